#include "lsir/admm.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace lsir {

AdmmState admm_init(int m, int d2) {
    AdmmState s;
    s.alpha = Vec::Zero(m + 1);
    s.eta = Vec::Zero(d2 + 1);
    s.zeta = Vec::Zero(m);
    s.v = Vec::Zero(m);
    return s;
}

AdmmState admm_solve(const Dataset& data, const Mat& q_design, const Mat& z_design,
                     const PenaltyParams& pen, const AdmmConfig& cfg, const AdmmState& warm) {
    const int n = data.n();
    const int mp1 = static_cast<int>(q_design.cols());
    const int M = mp1 - 1;
    const int pz = static_cast<int>(z_design.cols());
    if (q_design.rows() != n || z_design.rows() != n)
        throw std::invalid_argument("admm_solve: design row counts disagree");
    if (warm.alpha.size() != mp1 || warm.eta.size() != pz || warm.zeta.size() != M ||
        warm.v.size() != M)
        throw std::invalid_argument("admm_solve: warm state has wrong dimensions");

    const double vt = cfg.vartheta;

    // fixed pieces across inner iterations
    Mat qtq = q_design.transpose() * q_design;
    for (int m = 1; m < mp1; ++m) qtq(m, m) += n * vt; // n*vartheta on penalized coords
    Eigen::LDLT<Mat> alpha_solver(qtq);
    Eigen::LDLT<Mat> eta_solver(z_design.transpose() * z_design);
    if (alpha_solver.info() != Eigen::Success || eta_solver.info() != Eigen::Success)
        throw std::runtime_error("admm_solve: singular normal equations");
    const Vec qty = q_design.transpose() * data.y;
    const Vec zty = z_design.transpose() * data.y;
    const Mat qtz = q_design.transpose() * z_design;

    AdmmState s = warm;
    Vec prev(mp1 + pz);
    for (int l = 0; l < cfg.max_iter; ++l) {
        prev.head(mp1) = s.alpha;
        prev.tail(pz) = s.eta;

        // alpha update (C-style ridge normal equations, position 0 unpenalized)
        Vec rhs = qty - qtz * s.eta;
        for (int m = 0; m < M; ++m) rhs(m + 1) += n * (vt * s.zeta(m) - s.v(m));
        s.alpha = alpha_solver.solve(rhs);

        // eta update: OLS of (y - Q alpha) on z_design
        s.eta = eta_solver.solve(zty - qtz.transpose() * s.alpha);

        // zeta update: componentwise prox at u_m = alpha_m + v_m / vartheta
        for (int m = 0; m < M; ++m)
            s.zeta(m) = prox(s.alpha(m + 1) + s.v(m) / vt, pen, vt);

        // dual update
        for (int m = 0; m < M; ++m) s.v(m) += vt * (s.alpha(m + 1) - s.zeta(m));

        s.iterations = l + 1;
        if (!s.alpha.allFinite() || !s.eta.allFinite())
            throw std::runtime_error("admm_solve: iterates diverged");

        double change = (prev.head(mp1) - s.alpha).norm();
        change = std::hypot(change, (prev.tail(pz) - s.eta).norm());
        if (change < cfg.tol) {
            s.converged = true;
            break;
        }
    }
    s.gap = M > 0 ? (s.alpha.tail(M) - s.zeta).cwiseAbs().maxCoeff() : 0.0;
    return s;
}

} // namespace lsir
