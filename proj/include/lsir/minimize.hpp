#pragma once

#include <Eigen/Dense>
#include <functional>

namespace lsir {

struct MinimizeOptions {
    int max_iter = 200;
    double grad_tol = 1e-9;
    double step_tol = 1e-11;
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Objective callback: returns f(x) and fills the gradient.
using ObjGrad = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Box-constrained BFGS with projection and Armijo backtracking.
/// Monotone: iterates only move on strict decrease. Bounds may be +-inf.
MinimizeResult minimize_box(const ObjGrad& fg, Eigen::VectorXd x0, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, const MinimizeOptions& opts = {});

} // namespace lsir
