#include "lsir/simbench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>

#include "lsir/inference.hpp"
#include "lsir/knot_test.hpp"
#include "lsir/rng.hpp"
#include "lsir/special.hpp"
#include "lsir/tuning.hpp"

namespace lsir {

ErrorDist error_from_string(const std::string& s) {
    if (s == "normal") return ErrorDist::Normal;
    if (s == "schi2" || s == "chi2") return ErrorDist::SChi2;
    if (s == "t4") return ErrorDist::T4;
    throw std::invalid_argument("unknown error distribution: " + s);
}

Theta true_theta(const SimCase& sim) {
    Theta th;
    th.gamma0 = 0.0;
    th.gamma = Vec::Constant(1, 0.5);
    auto set = [&](std::initializer_list<double> beta2, std::initializer_list<double> tau,
                   double a0, std::initializer_list<double> alpha) {
        th.beta_rest = Vec(static_cast<int>(beta2.size()));
        int i = 0;
        for (double b : beta2) th.beta_rest(i++) = b;
        th.tau = Vec(static_cast<int>(tau.size()));
        i = 0;
        for (double t : tau) th.tau(i++) = t;
        th.alpha0 = a0;
        th.alpha = Vec(static_cast<int>(alpha.size()));
        i = 0;
        for (double a : alpha) th.alpha(i++) = a;
    };
    switch (sim.id) {
    case SimCaseId::C1: set({-1.0}, {0.0}, -1.0, {1.5}); break;
    case SimCaseId::C2: set({-1.0}, {-1.0, 1.0}, 1.0, {-2.0, 2.0}); break;
    case SimCaseId::C3: set({-2.0}, {-4.0, -2.0, 2.0, 4.0}, -1.0, {3.0, -2.0, -2.0, 3.0}); break;
    case SimCaseId::C4: set({-1.0}, {0.0}, 1.0, {sim.alpha_tilde}); break;
    case SimCaseId::C5: set({-1.0}, {-1.0, 1.0}, 1.0, {sim.alpha_tilde, sim.alpha_tilde}); break;
    }
    return th;
}

int true_m(const SimCase& sim) { return true_theta(sim).m(); }

Dataset gen_case(const SimCase& sim, std::uint64_t seed, int rep_index) {
    const Theta th = true_theta(sim);
    const int n = sim.n;
    RngStream rng(substream_seed(seed, static_cast<std::uint64_t>(rep_index)));

    // Cholesky factor of the equicorrelated (rho = 0.5) covariance
    Eigen::Matrix3d ups;
    ups << 1.0, 0.5, 0.5, 0.5, 1.0, 0.5, 0.5, 0.5, 1.0;
    const Eigen::Matrix3d chol = ups.llt().matrixL();

    Mat x(n, 2);
    Mat z(n, 1);
    Vec eps(n);
    for (int i = 0; i < n; ++i) {
        Eigen::Vector3d raw(rng.normal(), rng.normal(), rng.normal());
        Eigen::Vector3d breve = chol * raw;
        x(i, 0) = breve(0);
        x(i, 1) = 3.5 * (2.0 * norm_cdf(breve(1)) - 1.0);
        z(i, 0) = breve(2);
        switch (sim.error) {
        case ErrorDist::Normal: eps(i) = rng.normal(); break;
        case ErrorDist::SChi2: eps(i) = (rng.chi2_2() - 2.0) / 2.0; break;
        case ErrorDist::T4: eps(i) = rng.t4(); break;
        }
    }

    Vec y(n);
    for (int i = 0; i < n; ++i) {
        const double w = x(i, 0) + th.beta_rest(0) * x(i, 1);
        double mean = th.gamma(0) * z(i, 0) + th.alpha0 * w;
        for (int m = 0; m < th.m(); ++m) mean += th.alpha(m) * hinge(w, th.tau(m));
        y(i) = mean + sim.eps_scale * eps(i);
    }
    return Dataset(std::move(y), std::move(x), std::move(z));
}

namespace {

struct RepRecord {
    bool ok = false;
    bool matched = false;
    int m_hat = 0;
    Vec est, se;          // penalized, dimension of truth when matched
    Vec oracle_est, oracle_se;
    bool oracle_ok = false;
};

void summarize(const std::vector<const Vec*>& ests, const std::vector<const Vec*>& ses,
               const Vec& truth, const std::vector<std::string>& names,
               std::vector<ParamSummary>& out) {
    const int p = static_cast<int>(truth.size());
    const int r = static_cast<int>(ests.size());
    out.assign(p, {});
    if (r == 0) return;
    const double z975 = norm_quantile(0.975);
    for (int j = 0; j < p; ++j) {
        double mean = 0.0;
        for (const Vec* e : ests) mean += (*e)(j);
        mean /= r;
        double var = 0.0;
        for (const Vec* e : ests) var += ((*e)(j) - mean) * ((*e)(j) - mean);
        var = r > 1 ? var / (r - 1) : 0.0;
        double se_mean = 0.0;
        int cover = 0;
        for (int k = 0; k < r; ++k) {
            const double se = (*ses[k])(j);
            se_mean += se;
            if (std::fabs((*ests[k])(j) - truth(j)) <= z975 * se) ++cover;
        }
        out[j] = ParamSummary{names[j], truth(j), mean - truth(j), std::sqrt(var), se_mean / r,
                              100.0 * cover / r};
    }
}

template <typename Work>
void run_pool(int n_reps, int n_threads, Work&& work) {
    if (n_threads <= 0)
        n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, n_reps);
    if (n_threads <= 1) {
        for (int r = 0; r < n_reps; ++r) work(r);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (int r = next.fetch_add(1); r < n_reps; r = next.fetch_add(1)) work(r);
        });
    for (auto& th : pool) th.join();
}

} // namespace

RepMetrics run_replications(const SimCase& sim, const FitConfig& cfg, int n_reps, int n_threads) {
    if (n_reps < 1) throw std::invalid_argument("run_replications: n_reps must be >= 1");
    const Theta truth = true_theta(sim);
    const Vec truth_vec = theta_vector(truth);
    const int m_star = truth.m();

    std::vector<RepRecord> records(n_reps);
    run_pool(n_reps, n_threads, [&](int r) {
        RepRecord rec;
        try {
            const Dataset data = gen_case(sim, cfg.seed, r);
            const FitResult sel = select_lambda(data, cfg);
            rec.m_hat = sel.m_hat;
            rec.matched = sel.m_hat == m_star && sel.diagnostics.cov_ok;
            if (rec.matched) {
                rec.est = theta_vector(sel.theta);
                rec.se = sel.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
            }
            // a matched penalized fit is the natural oracle warm start; the
            // bare overload re-walks the path otherwise
            const FitResult orc = sel.m_hat == m_star
                                      ? fit_oracle(data, m_star, cfg, sel.theta)
                                      : fit_oracle(data, m_star, cfg);
            if (orc.diagnostics.cov_ok) {
                rec.oracle_est = theta_vector(orc.theta);
                rec.oracle_se = orc.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
                rec.oracle_ok = true;
            }
            rec.ok = true;
        } catch (const std::exception&) {
            rec.ok = false;
        }
        records[r] = std::move(rec);
    });

    RepMetrics metrics;
    metrics.n_reps = n_reps;
    metrics.selection.assign(cfg.m_cap + 1, 0.0);
    std::vector<const Vec*> pe, ps, oe, os;
    int n_ok = 0;
    for (const RepRecord& rec : records) {
        if (!rec.ok) {
            ++metrics.n_failed;
            continue;
        }
        ++n_ok;
        if (rec.m_hat >= 0 && rec.m_hat <= cfg.m_cap) metrics.selection[rec.m_hat] += 1.0;
        if (rec.matched) {
            ++metrics.n_matched;
            pe.push_back(&rec.est);
            ps.push_back(&rec.se);
        }
        if (rec.oracle_ok) {
            oe.push_back(&rec.oracle_est);
            os.push_back(&rec.oracle_se);
        }
    }
    if (n_ok > 0)
        for (double& s : metrics.selection) s /= n_ok;

    const std::vector<std::string> names = theta_names(truth);
    summarize(pe, ps, truth_vec, names, metrics.penalized);
    summarize(oe, os, truth_vec, names, metrics.oracle);
    return metrics;
}

RepMetrics run_test_replications(const SimCase& sim, const FitConfig& cfg, int n_boot,
                                 double level, int n_reps, int n_threads) {
    if (n_reps < 1) throw std::invalid_argument("run_test_replications: n_reps must be >= 1");
    // the paper's simulation grid: 100 evenly spaced points on [-2.5, 2.5]
    Vec grid(100);
    for (int i = 0; i < 100; ++i) grid(i) = -2.5 + 5.0 * i / 99.0;

    std::vector<int> outcome(n_reps, -1); // 1 reject, 0 keep, -1 failed
    run_pool(n_reps, n_threads, [&](int r) {
        try {
            const Dataset data = gen_case(sim, cfg.seed, r);
            const NullFit nf = fit_null(data);
            TestConfig tc{grid, n_boot, level,
                          SmoothSpec{cfg.kernel, Bandwidth(cfg.delta_for(sim.n))},
                          substream_seed(cfg.seed ^ 0x5ee7e57ULL, static_cast<std::uint64_t>(r))};
            outcome[r] = run_knot_test(data, nf, tc).reject ? 1 : 0;
        } catch (const std::exception&) {
            outcome[r] = -1;
        }
    });

    RepMetrics metrics;
    metrics.n_reps = n_reps;
    int rejected = 0, ok = 0;
    for (int o : outcome) {
        if (o < 0) {
            ++metrics.n_failed;
            continue;
        }
        ++ok;
        rejected += o;
    }
    metrics.rejection_rate = ok > 0 ? 100.0 * rejected / ok : 0.0;
    return metrics;
}

} // namespace lsir
