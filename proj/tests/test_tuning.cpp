#include <doctest.h>

#include <cmath>

#include "lsir/simbench.hpp"
#include "lsir/tuning.hpp"

using namespace lsir;

TEST_CASE("bic formula pieces") {
    // craft unit-MSE hinge residuals: y = prediction + alternating +-1
    const int n = 20;
    Mat x(n, 1);
    x.col(0) = Vec::LinSpaced(n, -2.0, 2.0);
    Theta th;
    th.alpha0 = 1.5;
    th.alpha = Vec(0);
    th.tau = Vec(0);
    th.beta_rest = Vec(0);
    th.gamma = Vec(0);
    Vec y(n);
    for (int i = 0; i < n; ++i) y(i) = 1.5 * x(i, 0) + (i % 2 == 0 ? 1.0 : -1.0);
    const Dataset data(y, x, Mat(n, 0));

    // log(1) = 0 leaves only the complexity term: (2*0 + 2 + 1 + 0) * Cn log(n) / (2n)
    CHECK(bic_value(data, th, CnRule::One) ==
          doctest::Approx(3.0 * std::log(20.0) / 40.0).epsilon(1e-12));

    const double delta = bic_value(data, th, CnRule::LogLogN) - bic_value(data, th, CnRule::One);
    CHECK(delta == doctest::Approx(3.0 * (std::log(std::log(20.0)) - 1.0) * std::log(20.0) /
                                   40.0)
                       .epsilon(1e-12));

    // exact interpolation -> -inf sentinel
    for (int i = 0; i < n; ++i) y(i) = 1.5 * x(i, 0);
    const Dataset exact(y, x, Mat(n, 0));
    CHECK(std::isinf(bic_value(exact, th, CnRule::One)));
    CHECK(bic_value(exact, th, CnRule::One) < 0);
}

TEST_CASE("bic is monotone in fit quality and complexity") {
    const SimCase sim{SimCaseId::C1, 300, ErrorDist::Normal, 0.0, 1.0};
    const Dataset data = gen_case(sim, 61, 0);
    Theta good = true_theta(sim);
    Theta bad = good;
    bad.alpha0 += 0.5; // worse SSE at the same complexity
    CHECK(bic_value(data, good, CnRule::LogLogN) < bic_value(data, bad, CnRule::LogLogN));

    // same residuals, one extra (inactive) knot: complexity term decides
    Theta padded = good;
    padded.alpha = Vec(2);
    padded.alpha << good.alpha(0), 0.0;
    padded.tau = Vec(2);
    padded.tau << good.tau(0), 1e6;
    CHECK(bic_value(data, good, CnRule::LogLogN) < bic_value(data, padded, CnRule::LogLogN));
}

TEST_CASE("select_lambda edge grids") {
    const SimCase sim{SimCaseId::C1, 300, ErrorDist::Normal, 0.0, 1.0};
    const Dataset data = gen_case(sim, 67, 0);
    FitConfig cfg;

    cfg.lambda_grid = {1e6};
    const FitResult dead = select_lambda(data, cfg);
    CHECK(dead.m_hat == 0);

    cfg.lambda_grid = {0.0};
    const FitResult full = select_lambda(data, cfg);
    CHECK(full.m_hat == cfg.m_cap); // no pruning at lambda = 0
    CHECK(full.lambda == 0.0);
}

TEST_CASE("select_lambda returns the bic argmin over the grid") {
    const SimCase sim{SimCaseId::C1, 400, ErrorDist::Normal, 0.0, 1.0};
    const Dataset data = gen_case(sim, 71, 0);
    FitConfig cfg;
    cfg.lambda_grid = {0.02, 0.1, 0.5, 2.0};
    const FitResult best = select_lambda(data, cfg);
    for (double lam : cfg.lambda_grid) {
        const FitResult one = fit_penalized(data, cfg, lam);
        CHECK(best.bic <= one.bic + 1e-9);
    }
    CHECK(best.bic == doctest::Approx(bic_score(data, best, BicSpec{cfg.cn})).epsilon(1e-12));
}

TEST_CASE("parallel cold-start mode agrees with itself") {
    const SimCase sim{SimCaseId::C1, 300, ErrorDist::Normal, 0.0, 1.0};
    const Dataset data = gen_case(sim, 73, 0);
    FitConfig cfg;
    cfg.lambda_grid = {0.05, 0.2, 1.0};
    const FitResult a = select_lambda(data, cfg, true);
    const FitResult b = select_lambda(data, cfg, true);
    CHECK(a.lambda == b.lambda);
    CHECK(a.bic == b.bic);
}

TEST_CASE("default grid spans four decades") {
    const SimCase sim{SimCaseId::C1, 300, ErrorDist::Normal, 0.0, 1.0};
    const Dataset data = gen_case(sim, 79, 0);
    FitConfig cfg;
    const auto grid = default_lambda_grid(data, cfg);
    CHECK(grid.size() == 40);
    CHECK(grid.front() / grid.back() == doctest::Approx(1e-4).epsilon(1e-10));
}
