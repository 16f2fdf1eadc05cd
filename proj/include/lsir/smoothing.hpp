#pragma once

#include <string>
#include <string_view>

namespace lsir {

/// Kernels with a closed-form convolution smoothing of the hinge.
enum class KernelKind { Uniform, Epanechnikov, Logistic, Gaussian };

KernelKind kernel_from_string(std::string_view name);
std::string to_string(KernelKind k);

/// Smoothing bandwidth, in the same units as the index w = X'beta.
struct Bandwidth {
    double delta;
    explicit Bandwidth(double d);
};

/// Hinge f(x,tau) = (x - tau) for x >= tau, else 0.
double hinge(double x, double tau);

/// Convolution-smoothed hinge q_n(x,tau). Everything is computed in the
/// shifted variable u = x - tau, so q_n(x,tau) = q_n(x - tau, 0).
/// Bounded-support kernels return the hinge exactly for |u| > delta;
/// the Gaussian window is cut at |u| = 8*delta (tail error < 1e-14).
double qn(double x, double tau, Bandwidth delta, KernelKind kernel);

/// d q_n / dx, always in [0,1]. The tau-derivative is the negation.
double qn_dx(double x, double tau, Bandwidth delta, KernelKind kernel);

/// d^2 q_n / dx^2 = K((x-tau)/delta) / delta, nonnegative.
double qn_dxx(double x, double tau, Bandwidth delta, KernelKind kernel);

} // namespace lsir
