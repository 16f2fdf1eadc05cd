#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "lsir/resultdoc.hpp"
#include "lsir/simbench.hpp"
#include "lsir/tuning.hpp"

using namespace lsir;
using json = nlohmann::ordered_json;

namespace {
std::string write_temp_csv(const std::string& body) {
    static int counter = 0;
    const std::string path = "/tmp/lsir_test_" + std::to_string(counter++) + ".csv";
    std::ofstream out(path);
    out << body;
    return path;
}
} // namespace

TEST_CASE("csv reading and error reporting") {
    const auto path = write_temp_csv("a,b\n1,2\n3,4\n");
    const CsvTable t = read_csv(path);
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    CHECK(t.values(1, 1) == 4.0);

    const auto bad = write_temp_csv("a,b\n1,2\n3,\n");
    CHECK_THROWS_WITH_AS(read_csv(bad), doctest::Contains("row 2"), DataError);

    const auto nonnum = write_temp_csv("a,b\n1,x\n");
    CHECK_THROWS_AS(read_csv(nonnum), DataError);

    const auto semi = write_temp_csv("a;b\n1;2\n");
    CHECK(read_csv(semi).header.size() == 2);

    CHECK_THROWS_AS(read_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("make_dataset: roles, negation, standardization") {
    const auto path = write_temp_csv("y,u,v,s\n"
                                     "1,1,10,0.1\n2,2,20,0.4\n3,3,30,0.2\n4,4,40,0.9\n"
                                     "5,5,50,0.5\n6,6,60,0.3\n7,7,70,0.7\n8,8,80,0.6\n");
    const CsvTable t = read_csv(path);
    ColumnSpec spec;
    spec.y = "y";
    spec.x = {"u", "v"};
    spec.z = {"s"};
    spec.negate = {"u"};
    std::optional<Standardization> stdz;
    const Dataset d = make_dataset(t, spec, &stdz);
    CHECK(d.x(0, 0) == -1.0); // negated
    CHECK_FALSE(stdz.has_value());

    spec.standardize = true;
    const Dataset ds = make_dataset(t, spec, &stdz);
    REQUIRE(stdz.has_value());
    CHECK(stdz->columns.size() == 3);
    CHECK(std::fabs(ds.x.col(0).mean()) < 1e-12);

    spec.x = {"missing"};
    CHECK_THROWS_WITH_AS(make_dataset(t, spec, &stdz), doctest::Contains("missing"), DataError);
}

TEST_CASE("result document round trip and raw-scale back-transform") {
    const SimCase sim{SimCaseId::C1, 400, ErrorDist::Normal, 0.0, 1.0};
    const Dataset raw = gen_case(sim, 19, 0);

    // write as CSV, reload with standardization
    std::string body = "y,x1,x2,z1\n";
    char buf[160];
    for (int i = 0; i < raw.n(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", raw.y(i), raw.x(i, 0),
                      raw.x(i, 1), raw.z(i, 0));
        body += buf;
    }
    const auto path = write_temp_csv(body);
    const CsvTable t = read_csv(path);
    ColumnSpec spec;
    spec.y = "y";
    spec.x = {"x1", "x2"};
    spec.z = {"z1"};
    spec.standardize = true;
    std::optional<Standardization> stdz;
    const Dataset data = make_dataset(t, spec, &stdz);

    FitConfig cfg;
    cfg.lambda_grid = {0.1};
    const FitResult fit = fit_penalized(data, cfg, 0.1);
    const json doc = build_result_document(data, cfg, fit, spec, stdz, 0.05);

    // serialization round-trips losslessly through 17-digit text
    const std::string text = dump_17g(doc);
    const json parsed = json::parse(text);
    CHECK(parsed.at("estimates").at("alpha0").get<double>() == fit.theta.alpha0);
    CHECK(parsed.at("m_hat").get<int>() == fit.m_hat);
    CHECK(parsed.at("config").at("columns").at("x").size() == 2);

    const Theta th = theta_from_document(parsed);
    CHECK(th.alpha0 == fit.theta.alpha0);
    CHECK(th.m() == fit.m_hat);

    // predictions from the document reproduce in-memory predictions on raw rows
    const Vec doc_pred = predict_from_document(parsed, t);
    const Vec direct = predict(data, fit.theta);
    CHECK((doc_pred - direct).cwiseAbs().maxCoeff() < 1e-10);

    // raw-scale intercept + slopes reproduce the same fitted values
    REQUIRE(parsed.contains("estimates_raw_scale"));
    const auto& rs = parsed.at("estimates_raw_scale");
    Theta raw_theta;
    raw_theta.alpha0 = rs.at("alpha0").get<double>();
    raw_theta.gamma0 = rs.at("gamma0").get<double>();
    const int m = fit.m_hat;
    raw_theta.alpha = Vec(m);
    raw_theta.tau = Vec(m);
    for (int k = 0; k < m; ++k) {
        raw_theta.alpha(k) = rs.at("alpha" + std::to_string(k + 1)).get<double>();
        raw_theta.tau(k) = rs.at("tau" + std::to_string(k + 1)).get<double>();
    }
    raw_theta.beta_rest = Vec::Constant(1, rs.at("beta2").get<double>());
    raw_theta.gamma = Vec::Constant(1, rs.at("gamma1").get<double>());
    const Vec raw_pred = predict(raw, raw_theta);
    CHECK((raw_pred - direct).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("dump_17g preserves doubles exactly") {
    json j;
    j["v"] = 0.1 + 0.2; // classic non-representable sum
    j["w"] = 1.0 / 3.0;
    j["arr"] = json::array({1e-300, 123456789.123456789});
    const json back = json::parse(dump_17g(j));
    CHECK(back.at("v").get<double>() == 0.1 + 0.2);
    CHECK(back.at("w").get<double>() == 1.0 / 3.0);
    CHECK(back.at("arr")[0].get<double>() == 1e-300);
    CHECK(back.at("arr")[1].get<double>() == 123456789.123456789);
}
