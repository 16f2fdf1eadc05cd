#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lsir/fit.hpp"
#include "lsir/inference.hpp"
#include "lsir/knot_test.hpp"
#include "lsir/simbench.hpp"
#include "lsir/smoothing.hpp"
#include "lsir/tuning.hpp"

namespace py = pybind11;
using namespace lsir;

namespace {

KernelKind parse_kernel(const std::string& s) { return kernel_from_string(s); }

PenaltyKind parse_penalty(const std::string& s, double t) {
    return penalty_from_string(s.c_str(), t);
}

FitConfig make_config(const std::string& kernel, const std::string& penalty, double t, double nu,
                      int m_cap, const std::string& cn, double vartheta,
                      std::vector<double> lambda_grid, std::uint64_t seed) {
    FitConfig cfg;
    cfg.kernel = parse_kernel(kernel);
    cfg.pen = parse_penalty(penalty, t);
    cfg.nu = nu;
    cfg.m_cap = m_cap;
    cfg.cn = (cn == "1" || cn == "one") ? CnRule::One : CnRule::LogLogN;
    cfg.admm.vartheta = vartheta;
    cfg.lambda_grid = std::move(lambda_grid);
    cfg.seed = seed;
    return cfg;
}

py::dict theta_dict(const Theta& th) {
    py::dict d;
    d["alpha0"] = th.alpha0;
    d["alpha"] = th.alpha;
    d["tau"] = th.tau;
    d["beta_rest"] = th.beta_rest;
    d["gamma0"] = th.gamma0;
    d["gamma"] = th.gamma;
    d["segment_slopes"] = th.segment_slopes();
    return d;
}

py::dict fit_dict(const FitResult& res) {
    py::dict d;
    d["theta"] = theta_dict(res.theta);
    d["m_hat"] = res.m_hat;
    d["sigma2"] = res.sigma2;
    d["cov"] = res.cov;
    d["r2"] = res.r2;
    d["bic"] = res.bic;
    d["lambda"] = res.lambda;
    d["converged"] = res.diagnostics.converged;
    d["outer_iterations"] = res.diagnostics.outer_iterations;
    d["parameter_names"] = theta_names(res.theta);
    d["estimates"] = theta_vector(res.theta);
    return d;
}

Theta theta_from_parts(double alpha0, const Vec& alpha, const Vec& tau, const Vec& beta_rest,
                       double gamma0, const Vec& gamma) {
    Theta th;
    th.alpha0 = alpha0;
    th.alpha = alpha;
    th.tau = tau;
    th.beta_rest = beta_rest;
    th.gamma0 = gamma0;
    th.gamma = gamma;
    return th;
}

} // namespace

PYBIND11_MODULE(_lsir, m) {
    m.doc() = "Linear spline index regression: penalized convolution-smoothed fitting, "
              "inference and knot tests";

    // smoothing primitives
    m.def(
        "hinge", [](double x, double tau) { return hinge(x, tau); }, py::arg("x"),
        py::arg("tau"));
    m.def(
        "qn",
        [](double x, double tau, double delta, const std::string& kernel) {
            return qn(x, tau, Bandwidth(delta), parse_kernel(kernel));
        },
        py::arg("x"), py::arg("tau"), py::arg("delta"), py::arg("kernel") = "uniform");
    m.def(
        "qn_dx",
        [](double x, double tau, double delta, const std::string& kernel) {
            return qn_dx(x, tau, Bandwidth(delta), parse_kernel(kernel));
        },
        py::arg("x"), py::arg("tau"), py::arg("delta"), py::arg("kernel") = "uniform");
    m.def(
        "qn_dxx",
        [](double x, double tau, double delta, const std::string& kernel) {
            return qn_dxx(x, tau, Bandwidth(delta), parse_kernel(kernel));
        },
        py::arg("x"), py::arg("tau"), py::arg("delta"), py::arg("kernel") = "uniform");

    // penalties
    m.def(
        "pen_value",
        [](double u, double lam, const std::string& penalty, double t) {
            return pen_value(u, PenaltyParams{lam, parse_penalty(penalty, t)});
        },
        py::arg("u"), py::arg("lam"), py::arg("penalty") = "scad", py::arg("t") = 0.0);
    m.def(
        "prox",
        [](double u, double lam, const std::string& penalty, double t, double vartheta) {
            return prox(u, PenaltyParams{lam, parse_penalty(penalty, t)}, vartheta);
        },
        py::arg("u"), py::arg("lam"), py::arg("penalty") = "scad", py::arg("t") = 0.0,
        py::arg("vartheta") = 1.0);
    m.def(
        "soft_threshold", [](double x, double lam) { return soft_threshold(x, lam); },
        py::arg("x"), py::arg("lam"));

    // fitting
    m.def(
        "fit",
        [](const Vec& y, const Mat& x, const Mat& z, const std::string& kernel,
           const std::string& penalty, double t, double nu, int m_cap, const std::string& cn,
           double vartheta, std::vector<double> lambda_grid, std::uint64_t seed) {
            const Dataset data(y, x, z);
            const FitConfig cfg = make_config(kernel, penalty, t, nu, m_cap, cn, vartheta,
                                              std::move(lambda_grid), seed);
            return fit_dict(select_lambda(data, cfg));
        },
        py::arg("y"), py::arg("x"), py::arg("z") = Mat(0, 0), py::arg("kernel") = "uniform",
        py::arg("penalty") = "scad", py::arg("t") = 0.0, py::arg("nu") = 0.6,
        py::arg("m_cap") = 5, py::arg("cn") = "loglogn", py::arg("vartheta") = 1.0,
        py::arg("lambda_grid") = std::vector<double>{}, py::arg("seed") = 42,
        "Fit the model across the lambda grid and return the BIC-selected fit.");

    m.def(
        "fit_at",
        [](const Vec& y, const Mat& x, const Mat& z, double lam, const std::string& kernel,
           const std::string& penalty, double t, double nu, int m_cap, const std::string& cn,
           double vartheta, std::uint64_t seed) {
            const Dataset data(y, x, z);
            const FitConfig cfg =
                make_config(kernel, penalty, t, nu, m_cap, cn, vartheta, {}, seed);
            return fit_dict(fit_penalized(data, cfg, lam));
        },
        py::arg("y"), py::arg("x"), py::arg("z") = Mat(0, 0), py::arg("lam") = 0.1,
        py::arg("kernel") = "uniform", py::arg("penalty") = "scad", py::arg("t") = 0.0,
        py::arg("nu") = 0.6, py::arg("m_cap") = 5, py::arg("cn") = "loglogn",
        py::arg("vartheta") = 1.0, py::arg("seed") = 42,
        "Single penalized fit at a fixed lambda.");

    m.def(
        "fit_oracle",
        [](const Vec& y, const Mat& x, const Mat& z, int m_true, const std::string& kernel,
           double nu, int m_cap) {
            const Dataset data(y, x, z);
            FitConfig cfg;
            cfg.kernel = parse_kernel(kernel);
            cfg.nu = nu;
            cfg.m_cap = m_cap;
            return fit_dict(fit_oracle(data, m_true, cfg));
        },
        py::arg("y"), py::arg("x"), py::arg("z") = Mat(0, 0), py::arg("m_true") = 1,
        py::arg("kernel") = "uniform", py::arg("nu") = 0.6, py::arg("m_cap") = 5,
        "Unsmoothed least-squares fit with a known knot count.");

    m.def(
        "fit_null",
        [](const Vec& y, const Mat& x, const Mat& z) {
            const Dataset data(y, x, z);
            const NullFit f = fit_null(data);
            py::dict d;
            d["alpha0"] = f.alpha0;
            d["beta_rest"] = f.beta_rest;
            d["gamma0"] = f.gamma0;
            d["gamma"] = f.gamma;
            d["weak_identification"] = f.weak_identification;
            return d;
        },
        py::arg("y"), py::arg("x"), py::arg("z") = Mat(0, 0),
        "Exact no-knot fit via the bilinear closed form.");

    m.def(
        "predict",
        [](const Mat& x, const Mat& z, double alpha0, const Vec& alpha, const Vec& tau,
           const Vec& beta_rest, double gamma0, const Vec& gamma) {
            const Theta th = theta_from_parts(alpha0, alpha, tau, beta_rest, gamma0, gamma);
            const int n = static_cast<int>(x.rows());
            Vec w = x.col(0);
            for (int j = 1; j < x.cols(); ++j) w += beta_rest(j - 1) * x.col(j);
            Vec yhat = gamma0 + (alpha0 * w).array();
            if (z.cols() > 0) yhat += z * gamma;
            for (int m = 0; m < th.m(); ++m)
                for (int i = 0; i < n; ++i) yhat(i) += alpha(m) * hinge(w(i), tau(m));
            return yhat;
        },
        py::arg("x"), py::arg("z"), py::arg("alpha0"), py::arg("alpha"), py::arg("tau"),
        py::arg("beta_rest"), py::arg("gamma0"), py::arg("gamma"));

    // knot existence test
    m.def(
        "test_knots",
        [](const Vec& y, const Mat& x, const Mat& z, int n_boot, double level,
           const std::string& kernel, double nu, int m_cap, std::uint64_t seed,
           const Vec& tau_grid) {
            const Dataset data(y, x, z);
            const NullFit nf = fit_null(data);
            TestConfig tc;
            tc.n_boot = n_boot;
            tc.level = level;
            tc.seed = seed;
            FitConfig cfg;
            cfg.kernel = parse_kernel(kernel);
            cfg.nu = nu;
            cfg.m_cap = m_cap;
            tc.spec = SmoothSpec{cfg.kernel, Bandwidth(cfg.delta_for(data.n()))};
            tc.tau_grid = tau_grid.size() > 0 ? tau_grid : default_tau_grid(data, nf);
            const KnotTestResult res = run_knot_test(data, nf, tc);
            py::dict d;
            d["t_stat"] = res.t_stat;
            d["crit"] = res.crit;
            d["p_value"] = res.p_value;
            d["reject"] = res.reject;
            d["curve"] = res.curve;
            d["grid"] = res.grid_kept;
            return d;
        },
        py::arg("y"), py::arg("x"), py::arg("z") = Mat(0, 0), py::arg("n_boot") = 1000,
        py::arg("level") = 0.05, py::arg("kernel") = "uniform", py::arg("nu") = 0.6,
        py::arg("m_cap") = 5, py::arg("seed") = 42, py::arg("tau_grid") = Vec(0),
        "Supremum score test with a multiplier bootstrap critical value.");

    // simulation bench
    m.def(
        "gen_case",
        [](int case_id, int n, const std::string& error, double alpha_tilde, double eps_scale,
           std::uint64_t seed, int rep_index) {
            SimCase sim{static_cast<SimCaseId>(case_id), n, error_from_string(error),
                        alpha_tilde, eps_scale};
            const Dataset d = gen_case(sim, seed, rep_index);
            py::dict out;
            out["y"] = d.y;
            out["x"] = d.x;
            out["z"] = d.z;
            out["true_theta"] = theta_dict(true_theta(sim));
            return out;
        },
        py::arg("case_id"), py::arg("n"), py::arg("error") = "normal",
        py::arg("alpha_tilde") = 0.0, py::arg("eps_scale") = 1.0, py::arg("seed") = 42,
        py::arg("rep_index") = 0, "Draw one replication of a paper simulation design.");

    m.attr("__version__") = "0.1.0";
}
