#include "lsir/minimize.hpp"

#include <cmath>
#include <stdexcept>

namespace lsir {

namespace {
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

Vec clamp(const Vec& x, const Vec& lo, const Vec& hi) { return x.cwiseMax(lo).cwiseMin(hi); }

// Components pushing outside an active bound do not count.
double projected_grad_norm(const Vec& x, const Vec& g, const Vec& lo, const Vec& hi) {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        double gi = g(i);
        if (x(i) <= lo(i) && gi > 0.0) gi = 0.0;
        if (x(i) >= hi(i) && gi < 0.0) gi = 0.0;
        s += gi * gi;
    }
    return std::sqrt(s);
}

void deactivate_bound_directions(const Vec& x, const Vec& lo, const Vec& hi, Vec& d) {
    for (int i = 0; i < x.size(); ++i) {
        if ((x(i) <= lo(i) && d(i) < 0.0) || (x(i) >= hi(i) && d(i) > 0.0)) d(i) = 0.0;
    }
}
} // namespace

MinimizeResult minimize_box(const ObjGrad& fg, Vec x0, const Vec& lo, const Vec& hi,
                            const MinimizeOptions& opts) {
    const int n = static_cast<int>(x0.size());
    if (lo.size() != n || hi.size() != n)
        throw std::invalid_argument("minimize_box: bound sizes disagree");

    MinimizeResult res;
    if (n == 0) {
        Vec g0(0);
        res.x = std::move(x0);
        res.f = fg(res.x, g0);
        res.converged = true;
        return res;
    }

    Vec x = clamp(x0, lo, hi);
    Vec g(n);
    double f = fg(x, g);
    Mat H = Mat::Identity(n, n);

    int it = 0;
    for (; it < opts.max_iter; ++it) {
        if (!std::isfinite(f)) throw std::runtime_error("minimize_box: non-finite objective");
        if (projected_grad_norm(x, g, lo, hi) <= opts.grad_tol * (1.0 + std::fabs(f))) {
            res.converged = true;
            break;
        }

        Vec d = -(H * g);
        deactivate_bound_directions(x, lo, hi, d);
        if (!d.allFinite() || d.dot(g) > -1e-12 * d.norm() * g.norm()) {
            H.setIdentity();
            d = -g;
            deactivate_bound_directions(x, lo, hi, d);
        }
        if (d.norm() == 0.0) {
            res.converged = true;
            break;
        }

        // Armijo backtracking along the projected path; accepts only decreases,
        // which keeps the outer block updates monotone.
        double step = 1.0;
        bool accepted = false;
        Vec x_new;
        Vec g_new(n);
        double f_new = f;
        for (int ls = 0; ls < 40; ++ls) {
            x_new = clamp(x + step * d, lo, hi);
            Vec dx = x_new - x;
            if (dx.norm() <= opts.step_tol * (1.0 + x.norm())) break;
            f_new = fg(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * g.dot(dx)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.converged = true; // no acceptable decrease at step_tol scale
            break;
        }

        Vec s = x_new - x;
        Vec yv = g_new - g;
        double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            Vec Hy = H * yv;
            double yHy = yv.dot(Hy);
            double rho = 1.0 / sy;
            H += (sy + yHy) * rho * rho * (s * s.transpose());
            H -= rho * (Hy * s.transpose() + s * Hy.transpose());
        }
        x = std::move(x_new);
        g = std::move(g_new);
        f = f_new;
    }

    res.x = std::move(x);
    res.f = f;
    res.iterations = it;
    return res;
}

} // namespace lsir
