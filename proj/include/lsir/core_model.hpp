#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lsir/smoothing.hpp"

namespace lsir {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Observations: response y, index covariates x (column 0 is the anchored
/// covariate X1), and linear covariates z (may have zero columns).
struct Dataset {
    Vec y;
    Mat x;
    Mat z;

    Dataset(Vec y_in, Mat x_in, Mat z_in);

    int n() const { return static_cast<int>(y.size()); }
    int d1() const { return static_cast<int>(x.cols()); }
    int d2() const { return static_cast<int>(z.cols()); }
};

/// Full parameter bundle. beta_1 == 1 is implicit; alpha and tau share
/// length M (the knot count carried by this bundle).
struct Theta {
    double alpha0 = 0.0;
    Vec alpha;     // slope increments alpha_1..alpha_M
    Vec tau;       // knot locations
    Vec beta_rest; // beta_2..beta_d1
    double gamma0 = 0.0;
    Vec gamma;

    int m() const { return static_cast<int>(alpha.size()); }

    /// Cumulative segment slopes mu_0..mu_M (mu_m = alpha0 + sum_{k<=m} alpha_k).
    Vec segment_slopes() const;
};

struct SmoothSpec {
    KernelKind kernel;
    Bandwidth delta;
};

/// Index w_i = X_i1 + Xtilde_i' beta_{(-1)}.
Vec index_values(const Dataset& data, const Theta& theta);

/// n x (M+1) matrix: column 0 is the index, column m is q_n(w_i, tau_m).
Mat smoothed_design(const Dataset& data, const Theta& theta, const SmoothSpec& spec);

/// T_i = y_i - gamma0 - z_i'gamma - alpha0 w_i - sum_m alpha_m q_n(w_i, tau_m).
Vec residuals_smoothed(const Dataset& data, const Theta& theta, const SmoothSpec& spec);

/// Half the sum of squared smoothed residuals (h_n).
double loss_smoothed(const Dataset& data, const Theta& theta, const SmoothSpec& spec);

/// Fitted values under the unsmoothed hinge model.
Vec predict(const Dataset& data, const Theta& theta);

/// R^2 = 1 - SSE/SST with hinge predictions; throws if y is constant.
double r_squared(const Dataset& data, const Theta& theta);

/// theta_1 coordinate vector in the inference order:
/// (alpha_1..alpha_M, tau_1..tau_M, alpha0, beta_2..beta_d1, gamma0, gamma).
Vec theta_vector(const Theta& theta);

/// Parameter names matching theta_vector entries.
std::vector<std::string> theta_names(const Theta& theta);

} // namespace lsir
