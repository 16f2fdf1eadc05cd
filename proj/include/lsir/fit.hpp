#pragma once

#include <cstdint>
#include <vector>

#include "lsir/admm.hpp"
#include "lsir/core_model.hpp"
#include "lsir/penalties.hpp"

namespace lsir {

/// BIC complexity constant: C_n = 1 (classical) or log(log n) (modified).
enum class CnRule { One, LogLogN };

struct FitConfig {
    KernelKind kernel = KernelKind::Uniform;
    PenaltyKind pen = scad();
    double nu = 0.6;  // bandwidth exponent
    int m_cap = 5;    // M_n
    CnRule cn = CnRule::LogLogN;
    int outer_max = 100;     // K
    double outer_tol = 1e-6; // eps_1
    AdmmConfig admm;
    std::vector<double> lambda_grid; // empty -> data-driven default grid
    std::uint64_t seed = 0;

    /// delta_n = {log(M_n)/n}^nu, held fixed across outer iterations.
    double delta_for(int n) const;
};

struct FitDiagnostics {
    int outer_iterations = 0;
    bool converged = false;
    double final_objective = 0.0; // penalized smoothed objective
    double feasibility_gap = 0.0; // max |alpha_m - zeta_m| from the last ADMM call
    int admm_iterations_total = 0;
    bool knot_collision = false;            // retained knots closer than delta_n
    bool cov_ok = true;                     // false when the sandwich was singular
    std::vector<int> plateau_flags;         // retained knots with |alpha_m| <= t*lambda
    std::vector<double> objective_path;     // objective after each of steps 1,2,3 per outer iter
};

struct FitResult {
    Theta theta; // pruned to m_hat knots, knots sorted ascending
    int m_hat = 0;
    double sigma2 = 0.0;
    Mat cov; // sandwich covariance, theta_vector order, s* = 1 + d1 + d2 + 2*m_hat
    double r2 = 0.0;
    double bic = 0.0;
    double lambda = 0.0;
    FitDiagnostics diagnostics;
};

/// Unpruned solver state, used to warm-start neighbouring lambda fits.
struct PathState {
    Theta full; // m_cap knots, dead ones parked at tau_inf with alpha ~ 0
    AdmmState admm;
    bool valid = false;
};

/// Null-model coefficients from the bilinear closed form.
struct NullFit {
    double alpha0 = 0.0;
    Vec beta_rest;
    double gamma0 = 0.0;
    Vec gamma;
    bool weak_identification = false; // |t-stat of the X1 coefficient| < 2
};

/// Default initializer: OLS of y on (1, X, Z) for (alpha0, beta, eta),
/// empirical index quantiles for tau, alpha_{(-0)} = 0.
Theta default_init(const Dataset& data, int m_knots);

/// Penalized smoothing least squares fit at a fixed lambda (Algorithm 1).
FitResult fit_penalized(const Dataset& data, const FitConfig& cfg, double lambda);

/// Same, continuing from / updating a path state for warm starts.
FitResult fit_penalized_warm(const Dataset& data, const FitConfig& cfg, double lambda,
                             PathState* path);

/// Builds a path state from a starting Theta (padded to m_cap knots).
PathState path_from_theta(const Dataset& data, const FitConfig& cfg, const Theta& start);

/// Oracle fit: unsmoothed least squares with the knot count fixed at m_true,
/// via the alternating loop with lambda = 0 and the bandwidth stepped down
/// geometrically to 1e-8.
FitResult fit_oracle(const Dataset& data, int m_true, const FitConfig& cfg, const Theta& init);
FitResult fit_oracle(const Dataset& data, int m_true, const FitConfig& cfg);

/// Exact global null fit (no knots) via bilinearity: regress y on
/// (1, z, X1, Xtilde), then alpha0 = a, beta_{(-1)} = c / a.
NullFit fit_null(const Dataset& data);

} // namespace lsir
