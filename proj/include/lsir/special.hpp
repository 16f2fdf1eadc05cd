#pragma once

namespace lsir {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF, accurate over the full double range.
double norm_cdf(double x);

/// Inverse standard normal CDF for p in (0,1).
double norm_quantile(double p);

/// Upper tail P(chi2_df > x), via the regularized incomplete gamma function.
/// Absolute accuracy ~1e-12 for moderate df.
double chi2_sf(double x, int df);

} // namespace lsir
