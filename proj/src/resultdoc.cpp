#include "lsir/resultdoc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "lsir/special.hpp"

namespace lsir {

using json = nlohmann::ordered_json;

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const char sep = line.find(',') == std::string::npos && line.find(';') != std::string::npos
                         ? ';'
                         : ',';

    auto split = [sep](const std::string& s) {
        std::vector<std::string> out;
        std::string cell;
        std::stringstream ss(s);
        while (std::getline(ss, cell, sep)) {
            // trim spaces and stray quotes
            const auto b = cell.find_first_not_of(" \t\"");
            const auto e = cell.find_last_not_of(" \t\"\r");
            out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
        }
        if (!s.empty() && s.back() == sep) out.push_back("");
        return out;
    };

    CsvTable table;
    table.header = split(line);
    const int ncol = static_cast<int>(table.header.size());
    std::vector<std::vector<double>> rows;
    int row_index = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row_index;
        const auto cells = split(line);
        if (static_cast<int>(cells.size()) != ncol)
            throw DataError("row " + std::to_string(row_index) + ": expected " +
                            std::to_string(ncol) + " fields, got " +
                            std::to_string(cells.size()));
        std::vector<double> vals(ncol);
        for (int j = 0; j < ncol; ++j) {
            try {
                std::size_t used = 0;
                if (cells[j].empty()) throw std::invalid_argument("empty");
                vals[j] = std::stod(cells[j], &used);
                if (used != cells[j].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw DataError("row " + std::to_string(row_index) + ", column '" +
                                table.header[j] + "': missing or non-numeric value");
            }
        }
        rows.push_back(std::move(vals));
    }
    table.values.resize(static_cast<int>(rows.size()), ncol);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < ncol; ++j) table.values(static_cast<int>(i), j) = rows[i][j];
    return table;
}

namespace {

int find_column(const CsvTable& table, const std::string& name) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw DataError("column not found: " + name);
    return static_cast<int>(it - table.header.begin());
}

Vec column_with_negation(const CsvTable& table, const std::string& name,
                         const std::vector<std::string>& negate) {
    Vec v = table.values.col(find_column(table, name));
    if (std::find(negate.begin(), negate.end(), name) != negate.end()) v = -v;
    return v;
}

} // namespace

Dataset make_dataset(const CsvTable& table, const ColumnSpec& spec,
                     std::optional<Standardization>* stdz) {
    if (spec.x.empty()) throw DataError("need at least one index covariate (--x)");
    const Vec y = column_with_negation(table, spec.y, spec.negate);
    const int n = static_cast<int>(y.size());
    Mat x(n, static_cast<int>(spec.x.size()));
    for (std::size_t j = 0; j < spec.x.size(); ++j)
        x.col(static_cast<int>(j)) = column_with_negation(table, spec.x[j], spec.negate);
    Mat z(n, static_cast<int>(spec.z.size()));
    for (std::size_t j = 0; j < spec.z.size(); ++j)
        z.col(static_cast<int>(j)) = column_with_negation(table, spec.z[j], spec.negate);

    if (stdz) stdz->reset();
    if (spec.standardize) {
        Standardization s;
        auto scale_block = [&](Mat& block, const std::vector<std::string>& names) {
            for (int j = 0; j < block.cols(); ++j) {
                const double m = block.col(j).mean();
                double sd = std::sqrt((block.col(j).array() - m).square().sum() /
                                      std::max(n - 1, 1));
                if (sd <= 0.0) throw DataError("column '" + names[j] + "' is constant");
                block.col(j) = (block.col(j).array() - m) / sd;
                s.columns.push_back(names[j]);
                s.mean.conservativeResize(s.mean.size() + 1);
                s.scale.conservativeResize(s.scale.size() + 1);
                s.mean(s.mean.size() - 1) = m;
                s.scale(s.scale.size() - 1) = sd;
            }
        };
        scale_block(x, spec.x);
        scale_block(z, spec.z);
        if (stdz) *stdz = std::move(s);
    }
    try {
        return Dataset(y, x, z);
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
}

std::string dump_17g(const json& j, int indent) {
    std::string out;
    std::function<void(const json&, int)> write = [&](const json& node, int depth) {
        const std::string pad(static_cast<std::size_t>(depth) * indent, ' ');
        const std::string pad_in(static_cast<std::size_t>(depth + 1) * indent, ' ');
        switch (node.type()) {
        case json::value_t::object: {
            if (node.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = node.begin(); it != node.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in + json(it.key()).dump() + ": ";
                write(it.value(), depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            if (node.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& el : node) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                write(el, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = node.get<double>();
            if (std::isnan(v)) {
                out += "null";
            } else if (std::isinf(v)) {
                out += v > 0 ? "1e999" : "-1e999";
            } else {
                char buf[40];
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                out += buf;
            }
            return;
        }
        default:
            out += node.dump();
            return;
        }
    };
    write(j, 0);
    out += "\n";
    return out;
}

namespace {

json vec_to_json(const Vec& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

} // namespace

json build_result_document(const Dataset& data, const FitConfig& cfg, const FitResult& fit,
                           const ColumnSpec& cols, const std::optional<Standardization>& stdz,
                           double ci_level) {
    const Theta& th = fit.theta;
    const Vec est = theta_vector(th);
    const std::vector<std::string> names = theta_names(th);
    const double z = norm_quantile(1.0 - ci_level / 2.0);

    const bool have_cov = fit.cov.rows() == static_cast<int>(names.size());
    json estimates, ses, cis;
    for (std::size_t j = 0; j < names.size(); ++j) {
        const double se =
            have_cov ? std::sqrt(std::max(fit.cov(j, j), 0.0)) : std::nan("");
        estimates[names[j]] = est(static_cast<int>(j));
        ses[names[j]] = se;
        cis[names[j]] = json::array({est(static_cast<int>(j)) - z * se,
                                     est(static_cast<int>(j)) + z * se});
    }

    json knots = json::array();
    for (int m = 0; m < fit.m_hat; ++m) {
        const int j = fit.m_hat + m; // tau block position in theta_vector
        const double se =
            have_cov ? std::sqrt(std::max(fit.cov(j, j), 0.0)) : std::nan("");
        knots.push_back(json{{"tau", th.tau(m)},
                             {"ci_lo", th.tau(m) - z * se},
                             {"ci_hi", th.tau(m) + z * se}});
    }

    const Vec w = index_values(data, th);

    json doc;
    doc["version"] = kVersion;
    doc["estimates"] = estimates;
    doc["standard_errors"] = ses;
    doc["conf_intervals"] = cis;
    doc["knots"] = knots;
    doc["m_hat"] = fit.m_hat;
    doc["segment_slopes"] = vec_to_json(th.segment_slopes());
    doc["r2"] = fit.r2;
    doc["sigma2"] = fit.sigma2;
    doc["bic"] = fit.bic;
    doc["lambda"] = fit.lambda;
    doc["index_range"] = json::array({w.minCoeff(), w.maxCoeff()});
    doc["diagnostics"] = json{{"outer_iterations", fit.diagnostics.outer_iterations},
                              {"converged", fit.diagnostics.converged},
                              {"final_objective", fit.diagnostics.final_objective},
                              {"feasibility_gap", fit.diagnostics.feasibility_gap},
                              {"admm_iterations_total", fit.diagnostics.admm_iterations_total},
                              {"knot_collision", fit.diagnostics.knot_collision},
                              {"cov_ok", fit.diagnostics.cov_ok},
                              {"plateau_flags", fit.diagnostics.plateau_flags}};

    json cfg_json;
    cfg_json["kernel"] = to_string(cfg.kernel);
    cfg_json["penalty"] = cfg.pen.family == PenaltyKind::Family::Scad ? "scad" : "mcp";
    cfg_json["t"] = cfg.pen.t;
    cfg_json["nu"] = cfg.nu;
    cfg_json["m_cap"] = cfg.m_cap;
    cfg_json["cn"] = cfg.cn == CnRule::One ? "1" : "loglogn";
    cfg_json["outer_max"] = cfg.outer_max;
    cfg_json["outer_tol"] = cfg.outer_tol;
    cfg_json["vartheta"] = cfg.admm.vartheta;
    cfg_json["admm_max_iter"] = cfg.admm.max_iter;
    cfg_json["admm_tol"] = cfg.admm.tol;
    cfg_json["delta"] = cfg.delta_for(data.n());
    cfg_json["seed"] = cfg.seed;
    cfg_json["ci_level"] = ci_level;
    cfg_json["n"] = data.n();
    cfg_json["columns"] = json{{"y", cols.y}, {"x", cols.x}, {"z", cols.z},
                               {"negate", cols.negate}};
    cfg_json["standardize"] = cols.standardize;
    doc["config"] = cfg_json;

    if (stdz) {
        doc["standardization"] = json{{"columns", stdz->columns},
                                      {"mean", vec_to_json(stdz->mean)},
                                      {"scale", vec_to_json(stdz->scale)}};
        // exact linear back-transform of the point estimates to the raw scale
        const int d1 = data.d1();
        const int d2 = data.d2();
        const double s1 = stdz->scale(0);
        double shift = -stdz->mean(0) / s1; // constant part of the working index
        for (int j = 1; j < d1; ++j)
            shift -= th.beta_rest(j - 1) * stdz->mean(j) / stdz->scale(j);
        json raw;
        raw["alpha0"] = th.alpha0 / s1;
        for (int m = 0; m < fit.m_hat; ++m) {
            raw["alpha" + std::to_string(m + 1)] = th.alpha(m) / s1;
            raw["tau" + std::to_string(m + 1)] = (th.tau(m) - shift) * s1;
        }
        for (int j = 1; j < d1; ++j)
            raw["beta" + std::to_string(j + 1)] =
                th.beta_rest(j - 1) * s1 / stdz->scale(j);
        double g0 = th.gamma0 + th.alpha0 * shift;
        for (int j = 0; j < d2; ++j) {
            g0 -= th.gamma(j) * stdz->mean(d1 + j) / stdz->scale(d1 + j);
            raw["gamma" + std::to_string(j + 1)] = th.gamma(j) / stdz->scale(d1 + j);
        }
        raw["gamma0"] = g0;
        doc["estimates_raw_scale"] = raw;
    }
    return doc;
}

Theta theta_from_document(const json& doc) {
    const int m = doc.at("m_hat").get<int>();
    const auto& est = doc.at("estimates");
    Theta th;
    th.alpha0 = est.at("alpha0").get<double>();
    th.gamma0 = est.at("gamma0").get<double>();
    th.alpha = Vec(m);
    th.tau = Vec(m);
    for (int k = 0; k < m; ++k) {
        th.alpha(k) = est.at("alpha" + std::to_string(k + 1)).get<double>();
        th.tau(k) = est.at("tau" + std::to_string(k + 1)).get<double>();
    }
    const auto& xs = doc.at("config").at("columns").at("x");
    const auto& zs = doc.at("config").at("columns").at("z");
    th.beta_rest = Vec(static_cast<int>(xs.size()) - 1);
    for (int j = 0; j < th.beta_rest.size(); ++j)
        th.beta_rest(j) = est.at("beta" + std::to_string(j + 2)).get<double>();
    th.gamma = Vec(static_cast<int>(zs.size()));
    for (int j = 0; j < th.gamma.size(); ++j)
        th.gamma(j) = est.at("gamma" + std::to_string(j + 1)).get<double>();
    return th;
}

Vec predict_from_document(const json& doc, const CsvTable& table) {
    const Theta th = theta_from_document(doc);
    const auto& cols = doc.at("config").at("columns");
    const std::vector<std::string> xs = cols.at("x").get<std::vector<std::string>>();
    const std::vector<std::string> zs = cols.at("z").get<std::vector<std::string>>();
    const std::vector<std::string> negate = cols.at("negate").get<std::vector<std::string>>();

    const int n = static_cast<int>(table.values.rows());
    Mat x(n, static_cast<int>(xs.size()));
    for (std::size_t j = 0; j < xs.size(); ++j)
        x.col(static_cast<int>(j)) = column_with_negation(table, xs[j], negate);
    Mat z(n, static_cast<int>(zs.size()));
    for (std::size_t j = 0; j < zs.size(); ++j)
        z.col(static_cast<int>(j)) = column_with_negation(table, zs[j], negate);

    if (doc.contains("standardization")) {
        const auto& s = doc.at("standardization");
        const auto mean = s.at("mean").get<std::vector<double>>();
        const auto scale = s.at("scale").get<std::vector<double>>();
        const int d1 = static_cast<int>(xs.size());
        for (int j = 0; j < d1; ++j) x.col(j) = (x.col(j).array() - mean[j]) / scale[j];
        for (int j = 0; j < z.cols(); ++j)
            z.col(j) = (z.col(j).array() - mean[d1 + j]) / scale[d1 + j];
    }

    Vec w = x.col(0);
    for (int j = 1; j < x.cols(); ++j) w += th.beta_rest(j - 1) * x.col(j);
    Vec yhat = th.gamma0 + (th.alpha0 * w).array();
    if (z.cols() > 0) yhat += z * th.gamma;
    for (int m = 0; m < th.m(); ++m)
        for (int i = 0; i < n; ++i) yhat(i) += th.alpha(m) * hinge(w(i), th.tau(m));
    return yhat;
}

} // namespace lsir
