#include <doctest.h>

#include <cmath>

#include "lsir/knot_test.hpp"
#include "lsir/rng.hpp"
#include "lsir/simbench.hpp"

using namespace lsir;

namespace {
TestConfig sim_test_config(const Dataset& data, const FitConfig& cfg, std::uint64_t seed,
                           int n_boot = 200) {
    Vec grid(50);
    for (int i = 0; i < 50; ++i) grid(i) = -2.5 + 5.0 * i / 49.0;
    return TestConfig{grid, n_boot, 0.05,
                      SmoothSpec{cfg.kernel, Bandwidth(cfg.delta_for(data.n()))}, seed};
}
} // namespace

TEST_CASE("grid points beyond the index support are dropped") {
    const SimCase sim{SimCaseId::C4, 200, ErrorDist::Normal, 0.0, 1.0};
    const Dataset data = gen_case(sim, 101, 0);
    const NullFit nf = fit_null(data);
    FitConfig cfg;
    TestConfig tc = sim_test_config(data, cfg, 1);
    Vec grid(3);
    grid << 0.0, 1.0, 1e6; // the last point is far beyond max w
    tc.tau_grid = grid;
    const KnotTestResult res = run_knot_test(data, nf, tc);
    CHECK(res.grid_kept.size() == 2);
    CHECK(res.curve.size() == 2);
}

TEST_CASE("statistic and bootstrap match their formulas on a small instance") {
    // tiny instance, d1 = 1, d2 = 0
    Vec y(6);
    y << 0.3, -0.1, 0.8, -0.4, 1.2, 0.05;
    Mat x(6, 1);
    x << -1.2, -0.4, 0.1, 0.6, 1.1, 1.7;
    const Dataset data(y, x, Mat(6, 0));
    const NullFit nf = fit_null(data);

    TestConfig tc;
    tc.tau_grid = Vec::LinSpaced(3, -0.5, 0.5);
    tc.n_boot = 64;
    tc.level = 0.25;
    tc.seed = 9;
    tc.spec = SmoothSpec{KernelKind::Uniform, Bandwidth(0.4)};

    const KnotTestResult res = run_knot_test(data, nf, tc);

    // direct re-computation from the displays
    const Vec w = x.col(0);
    Vec resid(6);
    for (int i = 0; i < 6; ++i) resid(i) = y(i) - nf.gamma0 - nf.alpha0 * w(i);
    Mat xi(6, 2);
    xi.col(0) = w;
    xi.col(1).setOnes();
    const Mat omega = xi.transpose() * xi / 6.0;

    double t_direct = 0.0;
    Vec curve_direct(3);
    for (int g = 0; g < 3; ++g) {
        const double tau0 = tc.tau_grid(g);
        double num = 0.0;
        Vec f_col(6);
        for (int i = 0; i < 6; ++i) {
            f_col(i) = hinge(w(i), tau0);
            num += qn(w(i), tau0, tc.spec.delta, tc.spec.kernel) * resid(i); // q_n here
        }
        const Vec d_hat = xi.transpose() * f_col / 6.0;
        const Vec proj = omega.ldlt().solve(d_hat);
        double rho = 0.0;
        for (int i = 0; i < 6; ++i) {
            const double psi_star = (f_col(i) - xi.row(i).dot(proj)) * resid(i); // hinge here
            rho += psi_star * psi_star;
        }
        rho /= 6.0;
        curve_direct(g) = num * num / (6.0 * rho);
        t_direct = std::max(t_direct, curve_direct(g));
    }
    CHECK(res.t_stat == doctest::Approx(t_direct).epsilon(1e-12));
    CHECK((res.curve - curve_direct).cwiseAbs().maxCoeff() < 1e-12);

    // numerator (q_n) and influence (hinge) paths genuinely differ
    bool differs = false;
    for (int g = 0; g < 3; ++g) {
        double num_f = 0.0, num_q = 0.0;
        for (int i = 0; i < 6; ++i) {
            num_f += hinge(w(i), tc.tau_grid(g)) * resid(i);
            num_q += qn(w(i), tc.tau_grid(g), tc.spec.delta, tc.spec.kernel) * resid(i);
        }
        if (std::fabs(num_f - num_q) > 1e-10) differs = true;
    }
    CHECK(differs);
}

TEST_CASE("bootstrap determinism and the add-one p-value") {
    const SimCase sim{SimCaseId::C4, 150, ErrorDist::Normal, 0.0, 1.0};
    const Dataset data = gen_case(sim, 103, 0);
    const NullFit nf = fit_null(data);
    FitConfig cfg;
    const TestConfig tc = sim_test_config(data, cfg, 77);
    const KnotTestResult a = run_knot_test(data, nf, tc);
    const KnotTestResult b = run_knot_test(data, nf, tc);
    CHECK(a.crit == b.crit); // bitwise
    CHECK(a.p_value == b.p_value);
    CHECK(a.reject == (a.t_stat > a.crit));
    CHECK(a.p_value >= 1.0 / (tc.n_boot + 1.0));

    TestConfig one = tc;
    one.n_boot = 1;
    const KnotTestResult c = run_knot_test(data, nf, one);
    CHECK((c.p_value == 0.5 || c.p_value == 1.0));
}

TEST_CASE("signal raises the statistic") {
    FitConfig cfg;
    const SimCase null_case{SimCaseId::C4, 400, ErrorDist::Normal, 0.0, 1.0};
    const SimCase alt_case{SimCaseId::C4, 400, ErrorDist::Normal, 1.0, 1.0};
    const Dataset d0 = gen_case(null_case, 7, 0);
    const Dataset d1 = gen_case(alt_case, 7, 0);
    const KnotTestResult r0 = run_knot_test(d0, fit_null(d0), sim_test_config(d0, cfg, 5));
    const KnotTestResult r1 = run_knot_test(d1, fit_null(d1), sim_test_config(d1, cfg, 5));
    CHECK(r1.t_stat > r0.t_stat);
    CHECK(r1.reject);
}

TEST_CASE("default grid covers the central index range") {
    const SimCase sim{SimCaseId::C4, 300, ErrorDist::Normal, 0.0, 1.0};
    const Dataset data = gen_case(sim, 109, 0);
    const NullFit nf = fit_null(data);
    const Vec grid = default_tau_grid(data, nf, 100);
    CHECK(grid.size() == 100);
    CHECK(grid(0) < grid(99));
    Theta th;
    th.alpha0 = nf.alpha0;
    th.beta_rest = nf.beta_rest;
    th.gamma0 = nf.gamma0;
    th.gamma = nf.gamma;
    th.alpha = Vec(0);
    th.tau = Vec(0);
    const Vec w = index_values(data, th);
    CHECK(grid(0) >= w.minCoeff());
    CHECK(grid(99) <= w.maxCoeff());
}
