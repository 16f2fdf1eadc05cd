#include "lsir/inference.hpp"
#include "lsir/special.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace lsir {

double sigma2_hat(const Dataset& data, const Theta& theta, const SmoothSpec& spec) {
    return residuals_smoothed(data, theta, spec).squaredNorm() / data.n();
}

Mat score_rows(const Dataset& data, const Theta& theta, const SmoothSpec& spec) {
    const int n = data.n();
    const int M = theta.m();
    const int d1 = data.d1();
    const int d2 = data.d2();
    const int s = 2 * M + 1 + (d1 - 1) + 1 + d2;
    const Vec w = index_values(data, theta);

    Mat h(n, s);
    for (int i = 0; i < n; ++i) {
        int k = 0;
        double dslope = theta.alpha0; // alpha0 + sum alpha_m qn'(w - tau_m)
        for (int m = 0; m < M; ++m) h(i, k++) = qn(w(i), theta.tau(m), spec.delta, spec.kernel);
        for (int m = 0; m < M; ++m) {
            const double dq = qn_dx(w(i), theta.tau(m), spec.delta, spec.kernel);
            h(i, k++) = -theta.alpha(m) * dq; // d/dtau q_n = -q_n'
            dslope += theta.alpha(m) * dq;
        }
        h(i, k++) = w(i);
        for (int j = 0; j < d1 - 1; ++j) h(i, k++) = dslope * data.x(i, j + 1);
        h(i, k++) = 1.0;
        for (int j = 0; j < d2; ++j) h(i, k++) = data.z(i, j);
    }
    return h;
}

SandwichParts sandwich_cov(const Dataset& data, const Theta& theta, const SmoothSpec& spec,
                           const PenaltyParams& pen) {
    const int n = data.n();
    const int M = theta.m();
    SandwichParts parts;
    parts.sigma2 = sigma2_hat(data, theta, spec);

    const Mat h = score_rows(data, theta, spec);
    parts.v_n = (h.transpose() * h) / n;

    const int s = static_cast<int>(parts.v_n.rows());
    parts.sigma_lambda = Vec::Zero(s);
    for (int m = 0; m < M; ++m) {
        const double a = std::fabs(theta.alpha(m));
        if (a > 0.0 && pen.lambda > 0.0) parts.sigma_lambda(m) = pen_deriv2(a, pen);
    }

    Mat bread = parts.v_n;
    bread.diagonal() += parts.sigma_lambda;
    const Eigen::SelfAdjointEigenSolver<Mat> es(bread);
    const double eig_max = es.eigenvalues().cwiseAbs().maxCoeff();
    if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(eig_max, 1e-300))
        throw std::runtime_error("sandwich_cov: singular bread matrix (non-identified fit)");
    Eigen::LDLT<Mat> solver(bread);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("sandwich_cov: singular bread matrix (non-identified fit)");
    const Mat binv_v = solver.solve(parts.v_n);
    Mat xi = (parts.sigma2 / n) * solver.solve(binv_v.transpose());
    parts.xi = 0.5 * (xi + xi.transpose()); // symmetrize away solve round-off
    return parts;
}

std::pair<double, double> confidence_interval(const SandwichParts& parts, const Theta& theta,
                                              int j, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("confidence_interval: level must be in (0,1)");
    const Vec t = theta_vector(theta);
    if (j < 0 || j >= t.size()) throw std::invalid_argument("confidence_interval: bad index");
    const double var = parts.xi(j, j);
    if (var < -1e-12) throw std::runtime_error("confidence_interval: negative variance");
    const double se = std::sqrt(std::max(var, 0.0));
    const double z = norm_quantile(1.0 - level / 2.0);
    return {t(j) - z * se, t(j) + z * se};
}

std::pair<double, double> wald_beta_test(const SandwichParts& parts, const Theta& theta) {
    const int M = theta.m();
    const int p = static_cast<int>(theta.beta_rest.size());
    if (p < 1) throw std::invalid_argument("wald_beta_test: requires d1 >= 2");
    const Mat cov_bb = parts.xi.block(2 * M + 1, 2 * M + 1, p, p);
    Eigen::LDLT<Mat> solver(cov_bb);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("wald_beta_test: singular beta covariance block");
    const double stat = theta.beta_rest.dot(solver.solve(theta.beta_rest));
    return {stat, chi2_sf(stat, p)};
}

} // namespace lsir
