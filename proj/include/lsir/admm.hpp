#pragma once

#include "lsir/core_model.hpp"
#include "lsir/penalties.hpp"

namespace lsir {

struct AdmmConfig {
    double vartheta = 1.0; // augmented-Lagrangian penalty
    int max_iter = 500;
    double tol = 1e-6; // on the change of (alpha, eta)
};

struct AdmmState {
    Vec alpha; // alpha_0..alpha_M
    Vec eta;   // gamma0, gamma
    Vec zeta;  // auxiliary copy of alpha_{(-0)}; carries the sparsity pattern
    Vec v;     // Lagrange multipliers
    int iterations = 0;
    bool converged = false;
    double gap = 0.0; // max_m |alpha_m - zeta_m| at exit
};

/// Zero-initialized state for M knots and d2 linear covariates.
AdmmState admm_init(int m, int d2);

/// ADMM inner loop for the penalized (alpha, eta) subproblem at fixed beta and
/// tau. q_design is the n x (M+1) smoothed design (column 0 unpenalized);
/// z_design must carry an all-ones intercept column first.
AdmmState admm_solve(const Dataset& data, const Mat& q_design, const Mat& z_design,
                     const PenaltyParams& pen, const AdmmConfig& cfg, const AdmmState& warm);

} // namespace lsir
