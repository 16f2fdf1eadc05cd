#pragma once

// Test-only oracles, kept independent of the library implementation paths
// they check: numerical quadrature, finite differences, and brute-force
// grid search.

#include <cmath>
#include <functional>
#include <random>

#include "lsir/core_model.hpp"

namespace oracles {

inline double fd_first(const std::function<double(double)>& f, double x, double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double fd_second(const std::function<double(double)>& f, double x, double h = 1e-4) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Composite Simpson rule on [a,b].
inline double quad(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    if (n % 2 == 1) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Brute-force argmin of f over [lo, hi] with the given step.
inline double grid_argmin(const std::function<double(double)>& f, double lo, double hi,
                          double step) {
    double best_x = lo;
    double best_f = f(lo);
    for (double x = lo + step; x <= hi; x += step) {
        const double v = f(x);
        if (v < best_f) {
            best_f = v;
            best_x = x;
        }
    }
    return best_x;
}

// Small random regression instance for solver checks.
inline lsir::Dataset random_dataset(std::mt19937_64& eng, int n, int d1, int d2) {
    std::normal_distribution<double> nd;
    lsir::Vec y(n);
    lsir::Mat x(n, d1), z(n, d2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d1; ++j) x(i, j) = nd(eng);
        for (int j = 0; j < d2; ++j) z(i, j) = nd(eng);
        y(i) = nd(eng);
    }
    return lsir::Dataset(y, x, z);
}

} // namespace oracles
