#include "lsir/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace lsir {

double bic_value(const Dataset& data, const Theta& theta, CnRule cn) {
    const int n = data.n();
    const double mse = (data.y - predict(data, theta)).squaredNorm() / n;
    const double cn_val = cn == CnRule::One ? 1.0 : std::log(std::log(static_cast<double>(n)));
    const double complexity =
        (2.0 * theta.m() + 2.0 + data.d1() + data.d2()) * cn_val * std::log(static_cast<double>(n)) /
        (2.0 * n);
    if (mse <= 0.0) return -std::numeric_limits<double>::infinity(); // exact interpolation
    return std::log(mse) + complexity;
}

double bic_score(const Dataset& data, const FitResult& result, const BicSpec& spec) {
    return bic_value(data, result.theta, spec.cn);
}

std::vector<double> default_lambda_grid(const Dataset& data, const FitConfig& cfg) {
    const Theta init = default_init(data, cfg.m_cap);
    const Vec w = index_values(data, init);
    const Vec yc = data.y.array() - data.y.mean();
    double lambda_max = 0.0;
    for (int m = 0; m < cfg.m_cap; ++m) {
        double dot = 0.0, mean_f = 0.0;
        for (int i = 0; i < data.n(); ++i) mean_f += hinge(w(i), init.tau(m));
        mean_f /= data.n();
        for (int i = 0; i < data.n(); ++i) dot += (hinge(w(i), init.tau(m)) - mean_f) * yc(i);
        lambda_max = std::max(lambda_max, std::fabs(dot) / data.n());
    }
    if (lambda_max <= 0.0) lambda_max = 1.0;

    const int k = 40;
    std::vector<double> grid(k);
    const double lo = std::log(1e-4 * lambda_max);
    const double hi = std::log(lambda_max);
    for (int i = 0; i < k; ++i) grid[i] = std::exp(lo + (hi - lo) * i / (k - 1));
    return grid;
}

FitResult select_lambda(const Dataset& data, const FitConfig& cfg, bool parallel) {
    std::vector<double> grid =
        cfg.lambda_grid.empty() ? default_lambda_grid(data, cfg) : cfg.lambda_grid;
    if (grid.empty()) throw std::invalid_argument("select_lambda: empty lambda grid");
    std::sort(grid.begin(), grid.end(), std::greater<>()); // descending: sparse to dense

    std::vector<FitResult> fits(grid.size());
    std::vector<std::string> errors(grid.size());
    if (!parallel) {
        PathState path;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            try {
                fits[i] = fit_penalized_warm(data, cfg, grid[i], &path);
            } catch (const std::exception& e) {
                errors[i] = e.what();
                path.valid = false; // do not warm-start off a failed fit
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        const unsigned workers =
            std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                            static_cast<unsigned>(grid.size())));
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
                    try {
                        fits[i] = fit_penalized(data, cfg, grid[i]);
                    } catch (const std::exception& e) {
                        errors[i] = e.what();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    int best = -1;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!errors[i].empty()) continue;
        if (best < 0 || fits[i].bic < fits[best].bic) best = static_cast<int>(i);
    }
    if (best < 0)
        throw std::runtime_error("select_lambda: every lambda failed; first error: " +
                                 errors.front());
    return fits[best];
}

} // namespace lsir
