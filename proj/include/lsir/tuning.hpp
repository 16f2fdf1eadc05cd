#pragma once

#include "lsir/fit.hpp"

namespace lsir {

struct BicSpec {
    CnRule cn = CnRule::LogLogN;
};

/// BIC at a fitted bundle: log of the mean squared *hinge* residual plus
/// (2M + 2 + d1 + d2) * C_n log(n)/(2n). Exact interpolation yields -inf.
double bic_value(const Dataset& data, const Theta& theta, CnRule cn);

double bic_score(const Dataset& data, const FitResult& result, const BicSpec& spec);

/// Data-driven default grid: 40 log-spaced points on [1e-4, 1] times the
/// largest |<hinge column, centered y>|/n at the initial bundle.
std::vector<double> default_lambda_grid(const Dataset& data, const FitConfig& cfg);

/// Fits every lambda in the grid (descending, warm-started) and returns the
/// fit minimizing the BIC; ties break toward the larger lambda. Set
/// parallel = true to fit grid points cold-started on worker threads.
FitResult select_lambda(const Dataset& data, const FitConfig& cfg, bool parallel = false);

} // namespace lsir
