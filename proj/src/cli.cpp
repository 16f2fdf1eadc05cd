#include "lsir/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "lsir/knot_test.hpp"
#include "lsir/resultdoc.hpp"
#include "lsir/simbench.hpp"
#include "lsir/tuning.hpp"

namespace lsir {

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitUsage = 64;

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot open output file: " + out_path);
    out << content;
}

struct CommonFitFlags {
    std::string data_path, out_path;
    ColumnSpec cols;
    std::string kernel = "uniform";
    std::string penalty = "scad";
    double t = 0.0;
    double nu = 0.6;
    int m_cap = 5;
    std::string cn = "loglogn";
    std::string lambda_grid; // comma list; empty -> auto
    bool lambda_auto = false;
    double level = 0.05;
    std::uint64_t seed = 42;
    double vartheta = 1.0;

    void attach(CLI::App* cmd, bool needs_columns) {
        cmd->add_option("--data", data_path, "input CSV path")->required();
        if (needs_columns) {
            cmd->add_option("--y", cols.y, "response column")->required();
            cmd->add_option("--x", cols.x, "index covariate columns (first = anchored X1)")
                ->required()
                ->delimiter(',');
            cmd->add_option("--z", cols.z, "linear covariate columns")->delimiter(',');
            cmd->add_option("--negate", cols.negate, "columns to negate before use")
                ->delimiter(',');
            cmd->add_flag("--standardize", cols.standardize,
                          "z-score X and Z columns before fitting");
        }
        cmd->add_option("--kernel", kernel, "uniform|epanechnikov|logistic|gaussian");
        cmd->add_option("--penalty", penalty, "scad|mcp");
        cmd->add_option("--t", t, "penalty concavity parameter override");
        cmd->add_option("--nu", nu, "bandwidth exponent");
        cmd->add_option("--m-cap", m_cap, "maximum knot count M_n");
        cmd->add_option("--cn", cn, "BIC constant: 1|loglogn");
        cmd->add_option("--lambda-grid", lambda_grid, "comma list of lambda values");
        cmd->add_flag("--lambda-auto", lambda_auto, "use the data-driven default grid");
        cmd->add_option("--level", level, "significance level");
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--vartheta", vartheta, "ADMM penalty parameter");
        cmd->add_option("--out", out_path, "output path (default stdout)");
    }

    FitConfig config() const {
        FitConfig cfg;
        cfg.kernel = kernel_from_string(kernel);
        cfg.pen = penalty_from_string(penalty.c_str(), t);
        cfg.nu = nu;
        cfg.m_cap = m_cap;
        if (cn == "1" || cn == "one")
            cfg.cn = CnRule::One;
        else if (cn == "loglogn")
            cfg.cn = CnRule::LogLogN;
        else
            throw CLI::ValidationError("--cn", "expected 1 or loglogn");
        cfg.admm.vartheta = vartheta;
        cfg.seed = seed;
        if (!lambda_grid.empty()) {
            std::stringstream ss(lambda_grid);
            std::string tok;
            while (std::getline(ss, tok, ',')) cfg.lambda_grid.push_back(std::stod(tok));
        }
        return cfg;
    }
};

int cmd_fit(const CommonFitFlags& f) {
    const CsvTable table = read_csv(f.data_path);
    std::optional<Standardization> stdz;
    const Dataset data = make_dataset(table, f.cols, &stdz);
    const FitConfig cfg = f.config();
    const FitResult fit = select_lambda(data, cfg);
    const json doc = build_result_document(data, cfg, fit, f.cols, stdz, f.level);
    write_output(f.out_path, dump_17g(doc));
    return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
    std::ifstream in(model_path);
    if (!in) throw DataError("cannot open model document: " + model_path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const std::exception& e) {
        throw DataError(std::string("cannot parse model document: ") + e.what());
    }
    const CsvTable table = read_csv(data_path);
    Vec yhat;
    try {
        yhat = predict_from_document(doc, table);
    } catch (const json::exception& e) {
        throw DataError(std::string("model document incompatible with data: ") + e.what());
    }
    std::string out = "y_hat\n";
    char buf[40];
    for (int i = 0; i < yhat.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", yhat(i));
        out += buf;
    }
    write_output(out_path, out);
    return kExitOk;
}

int cmd_curve(const std::string& model_path, const std::string& out_path, int points) {
    std::ifstream in(model_path);
    if (!in) throw DataError("cannot open model document: " + model_path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const std::exception& e) {
        throw DataError(std::string("cannot parse model document: ") + e.what());
    }
    const Theta th = theta_from_document(doc);
    const auto range = doc.at("index_range").get<std::vector<double>>();

    std::string out;
    char buf[128];
    for (const auto& k : doc.at("knots")) {
        std::snprintf(buf, sizeof(buf), "# knot\t%.17g\t%.17g\t%.17g\n",
                      k.at("tau").get<double>(), k.at("ci_lo").get<double>(),
                      k.at("ci_hi").get<double>());
        out += buf;
    }
    out += "w\tphi_hat\n";
    for (int i = 0; i < points; ++i) {
        const double w = range[0] + (range[1] - range[0]) * i / (points - 1);
        double phi = th.alpha0 * w;
        for (int m = 0; m < th.m(); ++m) phi += th.alpha(m) * hinge(w, th.tau(m));
        std::snprintf(buf, sizeof(buf), "%.17g\t%.17g\n", w, phi);
        out += buf;
    }
    write_output(out_path, out);
    return kExitOk;
}

int cmd_test(const CommonFitFlags& f, int n_boot, const std::string& tau_grid_spec) {
    const CsvTable table = read_csv(f.data_path);
    std::optional<Standardization> stdz;
    const Dataset data = make_dataset(table, f.cols, &stdz);
    const FitConfig cfg = f.config();
    const NullFit nf = fit_null(data);

    TestConfig tc;
    tc.n_boot = n_boot;
    tc.level = f.level;
    tc.seed = f.seed;
    tc.spec = SmoothSpec{cfg.kernel, Bandwidth(cfg.delta_for(data.n()))};
    if (tau_grid_spec.empty()) {
        tc.tau_grid = default_tau_grid(data, nf);
    } else {
        double lo, hi;
        int k;
        if (std::sscanf(tau_grid_spec.c_str(), "%lf:%lf:%d", &lo, &hi, &k) != 3 || k < 2 ||
            hi <= lo)
            throw CLI::ValidationError("--tau-grid", "expected lo:hi:k");
        tc.tau_grid = Vec(k);
        for (int i = 0; i < k; ++i) tc.tau_grid(i) = lo + (hi - lo) * i / (k - 1);
    }

    const KnotTestResult res = run_knot_test(data, nf, tc);
    json doc;
    doc["t_stat"] = res.t_stat;
    doc["crit"] = res.crit;
    doc["p_value"] = res.p_value;
    doc["reject"] = res.reject;
    doc["level"] = f.level;
    doc["n_boot"] = n_boot;
    json curve = json::array();
    for (int g = 0; g < res.curve.size(); ++g)
        curve.push_back(json::array({res.grid_kept(g), res.curve(g)}));
    doc["curve"] = curve;
    doc["null_fit"] = json{{"alpha0", nf.alpha0},
                           {"gamma0", nf.gamma0},
                           {"weak_identification", nf.weak_identification}};
    write_output(f.out_path, dump_17g(doc));
    return kExitOk;
}

json summaries_to_json(const std::vector<ParamSummary>& rows) {
    // table values multiplied by 100, following the reporting convention
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back(json{{"param", r.name},
                           {"truth", r.truth},
                           {"bias_x100", 100.0 * r.bias},
                           {"se_x100", 100.0 * r.se_mean},
                           {"sd_x100", 100.0 * r.sd},
                           {"cp_pct", r.cp}});
    return arr;
}

int cmd_simulate(const CommonFitFlags& f, int case_id, int n, const std::string& error,
                 int reps, double alpha_tilde, int n_boot, int threads) {
    SimCase sim;
    if (case_id < 1 || case_id > 5)
        throw CLI::ValidationError("--case", "expected 1..5");
    sim.id = static_cast<SimCaseId>(case_id);
    sim.n = n;
    sim.error = error_from_string(error);
    sim.alpha_tilde = alpha_tilde;

    const FitConfig cfg = f.config();
    json doc;
    doc["case"] = case_id;
    doc["n"] = n;
    doc["error"] = error;
    doc["reps"] = reps;
    doc["seed"] = f.seed;
    doc["config"] = json{{"penalty", f.penalty}, {"kernel", f.kernel},
                         {"nu", f.nu},           {"m_cap", f.m_cap},
                         {"cn", f.cn},           {"alpha_tilde", alpha_tilde}};
    doc["values_scaled_by"] = json{{"bias", 100}, {"se", 100}, {"sd", 100}};

    if (case_id <= 3) {
        const RepMetrics m = run_replications(sim, cfg, reps, threads);
        json sel = json::array();
        for (std::size_t k = 0; k < m.selection.size(); ++k)
            sel.push_back(json{{"m", k}, {"pct", 100.0 * m.selection[k]}});
        doc["selection"] = sel;
        doc["correct_selection_pct"] = 100.0 * m.selection[true_m(sim)];
        doc["penalized"] = summaries_to_json(m.penalized);
        doc["oracle"] = summaries_to_json(m.oracle);
        doc["n_matched"] = m.n_matched;
        doc["n_failed"] = m.n_failed;
    } else {
        const RepMetrics m = run_test_replications(sim, cfg, n_boot, f.level, reps, threads);
        doc["rejection_pct"] = m.rejection_rate;
        doc["n_boot"] = n_boot;
        doc["n_failed"] = m.n_failed;
    }
    write_output(f.out_path, dump_17g(doc));
    return kExitOk;
}

} // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Linear spline index regression: fitting, inference and knot tests"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    CommonFitFlags fit_flags, test_flags, sim_flags;

    auto* fit_cmd = app.add_subcommand("fit", "fit the model with BIC-selected penalty");
    fit_flags.attach(fit_cmd, true);

    auto* predict_cmd = app.add_subcommand("predict", "predict from a fitted model document");
    std::string model_path, pred_data, pred_out;
    predict_cmd->add_option("--model", model_path, "result document from `fit`")->required();
    predict_cmd->add_option("--data", pred_data, "covariate CSV")->required();
    predict_cmd->add_option("--out", pred_out, "output CSV (default stdout)");

    auto* curve_cmd = app.add_subcommand("curve", "export the fitted index curve as TSV");
    std::string curve_model, curve_out;
    int curve_points = 200;
    curve_cmd->add_option("--model", curve_model, "result document from `fit`")->required();
    curve_cmd->add_option("--points", curve_points, "grid size");
    curve_cmd->add_option("--out", curve_out, "output TSV (default stdout)");

    auto* test_cmd = app.add_subcommand("test-knots", "multiplier-bootstrap knot existence test");
    test_flags.attach(test_cmd, true);
    int n_boot = 1000;
    std::string tau_grid_spec;
    test_cmd->add_option("--boot", n_boot, "bootstrap draws");
    test_cmd->add_option("--tau-grid", tau_grid_spec, "grid as lo:hi:k");

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo bench for the paper's designs");
    sim_flags.attach(sim_cmd, false);
    sim_flags.data_path = "unused";
    int sim_case = 1, sim_n = 1000, sim_reps = 200, sim_boot = 1000, sim_threads = 0;
    std::string sim_error = "normal";
    double sim_alpha_tilde = 0.0;
    sim_cmd->get_option("--data")->required(false);
    sim_cmd->add_option("--case", sim_case, "simulation case 1..5")->required();
    sim_cmd->add_option("--n", sim_n, "sample size");
    sim_cmd->add_option("--error", sim_error, "normal|schi2|t4");
    sim_cmd->add_option("--reps", sim_reps, "replications");
    sim_cmd->add_option("--alpha-tilde", sim_alpha_tilde, "signal size for cases 4-5");
    sim_cmd->add_option("--boot", sim_boot, "bootstrap draws for cases 4-5");
    sim_cmd->add_option("--threads", sim_threads, "worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(fit_flags);
        if (predict_cmd->parsed()) return cmd_predict(model_path, pred_data, pred_out);
        if (curve_cmd->parsed()) return cmd_curve(curve_model, curve_out, curve_points);
        if (test_cmd->parsed()) return cmd_test(test_flags, n_boot, tau_grid_spec);
        if (sim_cmd->parsed())
            return cmd_simulate(sim_flags, sim_case, sim_n, sim_error, sim_reps,
                                sim_alpha_tilde, sim_boot, sim_threads);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}

} // namespace lsir
