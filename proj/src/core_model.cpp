#include "lsir/core_model.hpp"

#include <stdexcept>

namespace lsir {

Dataset::Dataset(Vec y_in, Mat x_in, Mat z_in)
    : y(std::move(y_in)), x(std::move(x_in)), z(std::move(z_in)) {
    const auto rows = y.size();
    if (x.rows() != rows || (z.cols() > 0 && z.rows() != rows))
        throw std::invalid_argument("Dataset: row counts of y, x, z disagree");
    if (x.cols() < 1) throw std::invalid_argument("Dataset: need at least one index covariate");
    if (z.cols() == 0) z.resize(rows, 0);
    if (rows <= x.cols() + z.cols() + 2)
        throw std::invalid_argument("Dataset: need n > d1 + d2 + 2");
    if (!y.allFinite() || !x.allFinite() || !z.allFinite())
        throw std::invalid_argument("Dataset: non-finite values");
}

Vec Theta::segment_slopes() const {
    Vec mu(m() + 1);
    mu(0) = alpha0;
    for (int k = 0; k < m(); ++k) mu(k + 1) = mu(k) + alpha(k);
    return mu;
}

namespace {
void check_dims(const Dataset& data, const Theta& theta) {
    if (theta.beta_rest.size() != data.d1() - 1)
        throw std::invalid_argument("theta: beta_rest length must be d1 - 1");
    if (theta.gamma.size() != data.d2())
        throw std::invalid_argument("theta: gamma length must be d2");
    if (theta.alpha.size() != theta.tau.size())
        throw std::invalid_argument("theta: alpha and tau lengths differ");
}
} // namespace

Vec index_values(const Dataset& data, const Theta& theta) {
    check_dims(data, theta);
    Vec w = data.x.col(0);
    if (data.d1() > 1) w += data.x.rightCols(data.d1() - 1) * theta.beta_rest;
    return w;
}

Mat smoothed_design(const Dataset& data, const Theta& theta, const SmoothSpec& spec) {
    const Vec w = index_values(data, theta);
    const int n = data.n();
    const int M = theta.m();
    Mat q(n, M + 1);
    q.col(0) = w;
    for (int m = 0; m < M; ++m) {
        const double tau_m = theta.tau(m);
        for (int i = 0; i < n; ++i) q(i, m + 1) = qn(w(i), tau_m, spec.delta, spec.kernel);
    }
    return q;
}

Vec residuals_smoothed(const Dataset& data, const Theta& theta, const SmoothSpec& spec) {
    const Vec w = index_values(data, theta);
    Vec r = data.y.array() - theta.gamma0 - (theta.alpha0 * w).array();
    if (data.d2() > 0) r -= data.z * theta.gamma;
    for (int m = 0; m < theta.m(); ++m) {
        const double a = theta.alpha(m);
        if (a == 0.0) continue;
        const double tau_m = theta.tau(m);
        for (int i = 0; i < data.n(); ++i) r(i) -= a * qn(w(i), tau_m, spec.delta, spec.kernel);
    }
    return r;
}

double loss_smoothed(const Dataset& data, const Theta& theta, const SmoothSpec& spec) {
    return 0.5 * residuals_smoothed(data, theta, spec).squaredNorm();
}

Vec predict(const Dataset& data, const Theta& theta) {
    const Vec w = index_values(data, theta);
    Vec yhat = theta.gamma0 + (theta.alpha0 * w).array();
    if (data.d2() > 0) yhat += data.z * theta.gamma;
    for (int m = 0; m < theta.m(); ++m) {
        const double a = theta.alpha(m);
        const double tau_m = theta.tau(m);
        for (int i = 0; i < data.n(); ++i) yhat(i) += a * hinge(w(i), tau_m);
    }
    return yhat;
}

double r_squared(const Dataset& data, const Theta& theta) {
    const Vec yhat = predict(data, theta);
    const double ybar = data.y.mean();
    const double sst = (data.y.array() - ybar).matrix().squaredNorm();
    if (sst == 0.0) throw std::runtime_error("r_squared: constant response (SST = 0)");
    const double sse = (data.y - yhat).squaredNorm();
    return 1.0 - sse / sst;
}

Vec theta_vector(const Theta& theta) {
    const int M = theta.m();
    const int d1m1 = static_cast<int>(theta.beta_rest.size());
    const int d2 = static_cast<int>(theta.gamma.size());
    Vec v(2 * M + 1 + d1m1 + 1 + d2);
    int k = 0;
    for (int m = 0; m < M; ++m) v(k++) = theta.alpha(m);
    for (int m = 0; m < M; ++m) v(k++) = theta.tau(m);
    v(k++) = theta.alpha0;
    for (int j = 0; j < d1m1; ++j) v(k++) = theta.beta_rest(j);
    v(k++) = theta.gamma0;
    for (int j = 0; j < d2; ++j) v(k++) = theta.gamma(j);
    return v;
}

std::vector<std::string> theta_names(const Theta& theta) {
    std::vector<std::string> names;
    const int M = theta.m();
    for (int m = 1; m <= M; ++m) names.push_back("alpha" + std::to_string(m));
    for (int m = 1; m <= M; ++m) names.push_back("tau" + std::to_string(m));
    names.push_back("alpha0");
    for (int j = 0; j < theta.beta_rest.size(); ++j)
        names.push_back("beta" + std::to_string(j + 2));
    names.push_back("gamma0");
    for (int j = 0; j < theta.gamma.size(); ++j)
        names.push_back("gamma" + std::to_string(j + 1));
    return names;
}

} // namespace lsir
