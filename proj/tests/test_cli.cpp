#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string cli_path() {
    const char* p = std::getenv("LSIR_CLI");
    REQUIRE_MESSAGE(p != nullptr, "LSIR_CLI must point at the built binary");
    return p;
}

std::string data_dir() {
    const char* p = std::getenv("LSIR_TEST_DATA");
    REQUIRE_MESSAGE(p != nullptr, "LSIR_TEST_DATA must point at tests/data");
    return p;
}

int run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kFitArgs =
    " fit --data {D}/tiny.csv --y y --x x1,x2 --z z1 --seed 7 --lambda-grid 0.05,0.2,1.0";

std::string with_data(std::string s) {
    const std::string key = "{D}";
    const auto pos = s.find(key);
    if (pos != std::string::npos) s.replace(pos, key.size(), data_dir());
    return s;
}

} // namespace

TEST_CASE("unknown subcommand exits 64 with usage") {
    CHECK(run("frobnicate") == 64);
    CHECK(run("") == 64);
}

TEST_CASE("malformed csv exits 2 and writes no output") {
    const std::string bad = "/tmp/lsir_cli_bad.csv";
    std::ofstream(bad) << "y,x1\n1,2\n3,oops\n";
    const std::string out = "/tmp/lsir_cli_bad_out.json";
    std::remove(out.c_str());
    CHECK(run("fit --data " + bad + " --y y --x x1 --out " + out) == 2);
    CHECK(slurp(out).empty());

    CHECK(run(with_data("fit --data {D}/tiny.csv --y y --x nope --out " + out)) == 2);
    CHECK(slurp(out).empty());
}

TEST_CASE("golden: identical bytes across runs at a fixed seed") {
    const std::string out1 = "/tmp/lsir_cli_fit1.json";
    const std::string out2 = "/tmp/lsir_cli_fit2.json";
    REQUIRE(run(with_data(kFitArgs) + " --out " + out1) == 0);
    REQUIRE(run(with_data(kFitArgs) + " --out " + out2) == 0);
    const std::string a = slurp(out1);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(out2));
    CHECK(a.find("\"estimates\"") != std::string::npos);
    CHECK(a.find("\"config\"") != std::string::npos); // full config echo
    CHECK(a.find("\"kernel\"") != std::string::npos);
}

TEST_CASE("predict reproduces the document's r2 on the training data") {
    const std::string model = "/tmp/lsir_cli_model.json";
    REQUIRE(run(with_data(kFitArgs) + " --out " + model) == 0);
    const std::string preds = "/tmp/lsir_cli_preds.csv";
    REQUIRE(run(with_data("predict --model " + model + " --data {D}/tiny.csv --out " + preds)) ==
            0);

    // recompute R2 from the prediction file and the raw data
    std::ifstream pf(preds);
    std::string line;
    std::getline(pf, line);
    CHECK(line == "y_hat");
    std::vector<double> yhat;
    while (std::getline(pf, line)) yhat.push_back(std::stod(line));

    std::ifstream df(data_dir() + "/tiny.csv");
    std::getline(df, line);
    std::vector<double> y;
    while (std::getline(df, line)) y.push_back(std::stod(line.substr(0, line.find(','))));
    REQUIRE(y.size() == yhat.size());
    double ybar = 0;
    for (double v : y) ybar += v;
    ybar /= y.size();
    double sse = 0, sst = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sse += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        sst += (y[i] - ybar) * (y[i] - ybar);
    }
    const double r2 = 1.0 - sse / sst;

    const std::string doc = slurp(model);
    const auto pos = doc.find("\"r2\": ");
    REQUIRE(pos != std::string::npos);
    const double doc_r2 = std::stod(doc.substr(pos + 6));
    CHECK(r2 == doctest::Approx(doc_r2).epsilon(1e-10));

    // schema mismatch -> exit 2
    CHECK(run("predict --model " + model + " --data /tmp/lsir_cli_bad.csv") == 2);
}

TEST_CASE("curve output is piecewise linear with the documented slopes") {
    const std::string model = "/tmp/lsir_cli_model2.json";
    REQUIRE(run(with_data(kFitArgs) + " --out " + model) == 0);
    const std::string curve = "/tmp/lsir_cli_curve.tsv";
    REQUIRE(run("curve --model " + model + " --points 400 --out " + curve) == 0);

    std::ifstream cf(curve);
    std::string line;
    std::vector<std::pair<double, double>> pts;
    std::vector<double> knots;
    while (std::getline(cf, line)) {
        if (line.rfind("# knot", 0) == 0) {
            std::stringstream ss(line.substr(7));
            double tau;
            ss >> tau;
            knots.push_back(tau);
            continue;
        }
        if (line.rfind("w\t", 0) == 0) continue;
        std::stringstream ss(line);
        double w, phi;
        ss >> w >> phi;
        pts.emplace_back(w, phi);
    }
    REQUIRE(pts.size() == 400);

    // continuity: jumps bounded by slope * step
    double max_slope = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        max_slope = std::max(max_slope, std::fabs((pts[i].second - pts[i - 1].second) /
                                                  (pts[i].first - pts[i - 1].first)));
    for (std::size_t i = 1; i < pts.size(); ++i)
        CHECK(std::fabs(pts[i].second - pts[i - 1].second) <=
              (max_slope + 1e-9) * (pts[i].first - pts[i - 1].first) + 1e-9);

    // slope left of the first knot equals alpha0 from the document
    const std::string doc = slurp(model);
    auto grab = [&](const std::string& key) {
        const auto p = doc.find("\"" + key + "\": ");
        REQUIRE(p != std::string::npos);
        return std::stod(doc.substr(p + key.size() + 4));
    };
    const double alpha0 = grab("alpha0");
    if (!knots.empty()) {
        double slope_left = 0.0;
        int used = 0;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (pts[i].first < knots.front()) {
                slope_left = (pts[i].second - pts[0].second) / (pts[i].first - pts[0].first);
                ++used;
            }
        }
        if (used > 3) CHECK(slope_left == doctest::Approx(alpha0).epsilon(1e-6));
    }
}

TEST_CASE("test-knots runs deterministically on the bundled data") {
    const std::string out1 = "/tmp/lsir_cli_test1.json";
    const std::string out2 = "/tmp/lsir_cli_test2.json";
    const std::string args = with_data(
        "test-knots --data {D}/tiny.csv --y y --x x1,x2 --z z1 --boot 200 --seed 11 --out ");
    REQUIRE(run(args + out1) == 0);
    REQUIRE(run(args + out2) == 0);
    const std::string a = slurp(out1);
    CHECK(a == slurp(out2));
    CHECK(a.find("\"p_value\"") != std::string::npos);
    CHECK(a.find("\"curve\"") != std::string::npos);
}

TEST_CASE("simulate emits a selection table") {
    const std::string out = "/tmp/lsir_cli_sim.json";
    REQUIRE(run("simulate --case 1 --n 200 --reps 2 --seed 5 --lambda-grid 0.05,0.3 --out " +
                out) == 0);
    const std::string doc = slurp(out);
    CHECK(doc.find("\"correct_selection_pct\"") != std::string::npos);
    CHECK(doc.find("\"values_scaled_by\"") != std::string::npos);
}
