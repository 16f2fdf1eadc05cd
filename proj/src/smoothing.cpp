#include "lsir/smoothing.hpp"
#include "lsir/special.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace lsir {

KernelKind kernel_from_string(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "uniform") return KernelKind::Uniform;
    if (s == "epanechnikov") return KernelKind::Epanechnikov;
    if (s == "logistic") return KernelKind::Logistic;
    if (s == "gaussian") return KernelKind::Gaussian;
    throw std::invalid_argument("unknown kernel: " + s);
}

std::string to_string(KernelKind k) {
    switch (k) {
    case KernelKind::Uniform: return "uniform";
    case KernelKind::Epanechnikov: return "epanechnikov";
    case KernelKind::Logistic: return "logistic";
    case KernelKind::Gaussian: return "gaussian";
    }
    return "?";
}

Bandwidth::Bandwidth(double d) : delta(d) {
    if (!(d > 0.0)) throw std::invalid_argument("Bandwidth: delta must be > 0");
}

double hinge(double x, double tau) { return x >= tau ? x - tau : 0.0; }

double qn(double x, double tau, Bandwidth bw, KernelKind kernel) {
    const double d = bw.delta;
    const double u = x - tau;
    switch (kernel) {
    case KernelKind::Uniform:
        if (u > d) return u;
        if (u < -d) return 0.0;
        return (u + d) * (u + d) / (4.0 * d);
    case KernelKind::Epanechnikov: {
        if (u > d) return u;
        if (u < -d) return 0.0;
        const double u2 = u * u;
        return (-u2 * u2 / (d * d * d) + 6.0 * u2 / d + 8.0 * u + 3.0 * d) / 16.0;
    }
    case KernelKind::Logistic:
        // stable softplus: d*log(1+exp(u/d)) = max(u,0) + d*log1p(exp(-|u|/d))
        return std::max(u, 0.0) + d * std::log1p(std::exp(-std::fabs(u) / d));
    case KernelKind::Gaussian: {
        if (std::fabs(u) > 8.0 * d) return hinge(x, tau);
        const double z = u / d;
        return u * norm_cdf(z) + d * norm_pdf(z);
    }
    }
    return 0.0;
}

double qn_dx(double x, double tau, Bandwidth bw, KernelKind kernel) {
    const double d = bw.delta;
    const double u = x - tau;
    switch (kernel) {
    case KernelKind::Uniform:
        if (u > d) return 1.0;
        if (u < -d) return 0.0;
        return (u + d) / (2.0 * d);
    case KernelKind::Epanechnikov: {
        if (u > d) return 1.0;
        if (u < -d) return 0.0;
        const double z = u / d;
        return 0.5 + 0.75 * (z - z * z * z / 3.0);
    }
    case KernelKind::Logistic: {
        // logistic sigmoid of u/d, computed from the negative tail
        const double z = u / d;
        if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
        const double e = std::exp(z);
        return e / (1.0 + e);
    }
    case KernelKind::Gaussian:
        if (u > 8.0 * d) return 1.0;
        if (u < -8.0 * d) return 0.0;
        return norm_cdf(u / d);
    }
    return 0.0;
}

double qn_dxx(double x, double tau, Bandwidth bw, KernelKind kernel) {
    const double d = bw.delta;
    const double u = x - tau;
    const double z = u / d;
    switch (kernel) {
    case KernelKind::Uniform:
        return std::fabs(z) <= 1.0 ? 0.5 / d : 0.0;
    case KernelKind::Epanechnikov:
        return std::fabs(z) <= 1.0 ? 0.75 * (1.0 - z * z) / d : 0.0;
    case KernelKind::Logistic: {
        const double e = std::exp(-std::fabs(z));
        const double s = e / ((1.0 + e) * (1.0 + e));
        return s / d;
    }
    case KernelKind::Gaussian:
        return std::fabs(z) <= 8.0 ? norm_pdf(z) / d : 0.0;
    }
    return 0.0;
}

} // namespace lsir
