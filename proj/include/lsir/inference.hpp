#pragma once

#include <utility>

#include "lsir/core_model.hpp"
#include "lsir/penalties.hpp"

namespace lsir {

/// Pieces of the sandwich estimator Xi = sigma2/n * B^{-1} V B^{-1},
/// B = V + Sigma_lambda, in the theta_vector coordinate order.
struct SandwichParts {
    double sigma2 = 0.0;
    Mat v_n;              // n^{-1} sum H_i H_i'
    Vec sigma_lambda;     // diagonal of Sigma_lambda (only first M entries nonzero)
    Mat xi;               // covariance estimate for theta_1
};

/// Mean squared smoothed residual (uses q_n, not the hinge).
double sigma2_hat(const Dataset& data, const Theta& theta, const SmoothSpec& spec);

/// n x s* score matrix; row i is H_ni(theta_1):
/// (q_n(w,tau_1..M), alpha_m d/dtau_m q_n, w, [alpha0 Xt + sum alpha_m dq/dbeta]', Zt').
Mat score_rows(const Dataset& data, const Theta& theta, const SmoothSpec& spec);

/// Assembles sigma2, V_n, Sigma_lambda (from pen_deriv2 at |alpha_m|) and Xi.
SandwichParts sandwich_cov(const Dataset& data, const Theta& theta, const SmoothSpec& spec,
                           const PenaltyParams& pen);

/// Normal confidence interval for theta_vector entry j at level varsigma.
std::pair<double, double> confidence_interval(const SandwichParts& parts, const Theta& theta,
                                              int j, double level);

/// Wald statistic for H0: beta_{(-1)} = 0 and its chi-square(d1-1) p-value.
std::pair<double, double> wald_beta_test(const SandwichParts& parts, const Theta& theta);

} // namespace lsir
