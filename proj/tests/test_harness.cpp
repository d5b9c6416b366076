#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ttomo/analytic.hpp"
#include "ttomo/report.hpp"
#include "ttomo/suites.hpp"
#include "ttomo/ucp.hpp"

using namespace ttomo;
namespace fs = std::filesystem;

namespace {

VerificationReport fixture() {
    VerificationReport r;
    r.suite = "demo";
    r.seed = 7;
    r.header = "fixture";
    r.checks.push_back({"first", "a = b", 0.25, 0.5, false, true, 1.5, ""});
    r.checks.push_back({"second", "x, \"y\"", 2.0, 1.0, true, true, 0.0, "margin"});
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("ttomo_harness_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("empty report is valid JSON with zero checks") {
    VerificationReport r;
    r.suite = "tensor";
    auto j = nlohmann::json::parse(to_json_string(r));
    CHECK(j["checks"].empty());
    CHECK(j["aggregate_pass"] == true);
    CHECK(r.pass());
}

TEST_CASE("golden JSON is byte-stable with sorted keys") {
    const std::string golden = R"({
  "aggregate_pass": true,
  "checks": [
    {
      "anchor": "a = b",
      "comparison": "<=",
      "name": "first",
      "note": "",
      "pass": true,
      "residual": 0.25,
      "tolerance": 0.5,
      "wall_time": 1.5
    },
    {
      "anchor": "x, \"y\"",
      "comparison": ">",
      "name": "second",
      "note": "margin",
      "pass": true,
      "residual": 2.0,
      "tolerance": 1.0,
      "wall_time": 0.0
    }
  ],
  "header": "fixture",
  "seed": 7,
  "suite": "demo"
}
)";
    CHECK(to_json_string(fixture()) == golden);
    auto back = report_from_json(nlohmann::json::parse(golden));
    CHECK(to_json_string(back) == golden);
}

TEST_CASE("aggregate pass follows the checks; non-finite values become null") {
    auto r = fixture();
    r.checks[1].pass = false;
    r.checks[1].residual = NAN;
    CHECK_FALSE(r.pass());
    auto j = to_json(r);
    CHECK(j["aggregate_pass"] == false);
    CHECK(j["checks"][1]["residual"].is_null());
    CHECK(std::isnan(report_from_json(j).checks[1].residual));
    CHECK(r.find("first") == &r.checks[0]);
    CHECK(r.find("missing") == nullptr);
}

TEST_CASE("CSV has the documented header and quotes fields") {
    const auto csv = to_csv(fixture());
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "name,anchor,comparison,residual,tolerance,pass,wall_time,note");
    std::getline(is, line);
    CHECK(line == "first,a = b,<=,0.25,0.5,true,1.5,");
    std::getline(is, line);
    CHECK(line == "second,\"x, \"\"y\"\"\",>,2,1,true,0,margin");
}

TEST_CASE("emit writes report.json and residuals.csv") {
    auto dir = scratch("emit");
    emit(fixture(), (dir / "out").string());
    CHECK(slurp(dir / "out/report.json") == to_json_string(fixture()));
    CHECK(slurp(dir / "out/residuals.csv") == to_csv(fixture()));
}

TEST_CASE("Gaussian heatmap has its brightest pixel at the grid center") {
    GridSpec g{2, 64, 4.0, true};
    AnalyticField f(2, 0);
    const double c[2] = {0, 0};
    f[0] = AnalyticScalar::gaussian(2, c, 1.0);
    auto gf = sample(f, g);
    auto dir = scratch("ppm");
    auto info = write_ppm(gf, 0, (dir / "g.ppm").string());
    CHECK(info.max == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(info.width == 64);

    const auto bytes = slurp(dir / "g.ppm");
    // header: P6, comment, size, maxval
    std::size_t pos = 0;
    for (int lines = 0; lines < 4; ++lines) pos = bytes.find('\n', pos) + 1;
    CHECK(bytes.substr(0, 3) == "P6\n");
    CHECK(bytes.find("# |f| min") != std::string::npos);
    REQUIRE(bytes.size() - pos == 3u * 64 * 64);
    std::size_t best = 0;
    for (std::size_t p = 0; p < 64 * 64; ++p)
        if (static_cast<unsigned char>(bytes[pos + 3 * p]) > static_cast<unsigned char>(bytes[pos + 3 * best])) best = p;
    // node j = N/2 sits at x = 0; row 0 is the top (largest j1)
    const int row = static_cast<int>(best / 64), col = static_cast<int>(best % 64);
    CHECK(col == 32);
    CHECK(row == 64 - 1 - 32);
    CHECK(static_cast<unsigned char>(bytes[pos + 3 * best]) == 255);
    CHECK_THROWS_AS(write_ppm(gf, 1, (dir / "h.ppm").string()), std::out_of_range);
}

TEST_CASE("tensor suite passes with defaults and is deterministic") {
    SuiteConfig cfg;
    auto a = run_suite("tensor", cfg);
    auto b = run_suite("tensor", cfg);
    CHECK(a.pass());
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        CHECK(a.checks[i].name == b.checks[i].name);
        CHECK(a.checks[i].residual == b.checks[i].residual);
        CHECK_FALSE(a.checks[i].anchor.empty());
    }
}

TEST_CASE("diffid mutation fails exactly the mutated check") {
    SuiteConfig cfg;
    auto clean = run_suite("diffid", cfg);
    CHECK(clean.pass());
    cfg.mutations = {"diffid.curl_curl_sign"};
    auto bad = run_suite("diffid", cfg);
    for (const auto& c : bad.checks) CHECK_MESSAGE(c.pass == (c.name != "curl_curl"), c.name);
}

TEST_CASE("every mutation names a check of its suite") {
    const auto& ids = suite_ids();
    for (const auto& m : mutation_table()) {
        CHECK(std::find(ids.begin(), ids.end(), m.suite) != ids.end());
        CHECK(m.id.rfind(m.suite + ".", 0) == 0);
    }
    SuiteConfig cfg;
    cfg.mutations = {"tensor.symbol_identity"};
    auto r = run_suite("tensor", cfg);
    CHECK(r.find("symbol_identity") != nullptr);
    CHECK_FALSE(r.find("symbol_identity")->pass);
}

TEST_CASE("configuration errors") {
    SuiteConfig cfg;
    CHECK_THROWS_AS(run_suite("nope", cfg), std::invalid_argument);
    cfg.tolerances["sym_dim"] = 0.0;
    CHECK_THROWS_AS(run_suite("tensor", cfg), std::invalid_argument);
    cfg.tolerances.clear();
    cfg.mutations = {"tensor.nothing"};
    CHECK_THROWS_AS(run_suite("tensor", cfg), std::invalid_argument);
    cfg.mutations.clear();
    cfg.n = 3;
    cfg.grid = default_grid(3);
    CHECK_THROWS_AS(run_suite("normal", cfg), std::invalid_argument);
    CHECK_NOTHROW(run_suite("tensor", cfg));
}

TEST_CASE("per-check tolerance override is applied") {
    SuiteConfig cfg;
    cfg.tolerances["dot_duality"] = 1e-30;
    auto r = run_suite("tensor", cfg);
    CHECK(r.find("dot_duality")->tolerance == 1e-30);
    CHECK(r.find("sym_dim")->tolerance == 1e-12);
}

TEST_CASE("config JSON round trip") {
    SuiteConfig cfg;
    cfg.suite = "xray";
    cfg.n = 3;
    cfg.grid = default_grid(3);
    cfg.seed = 42;
    cfg.samples = 12;
    cfg.tolerances = {{"gauge_identity", 1e-7}};
    cfg.mutations = {"xray.gauge_sign"};
    auto back = SuiteConfig::from_json(nlohmann::json::parse(cfg.to_json().dump()));
    CHECK(back.to_json() == cfg.to_json());
    CHECK(back.grid.N == 48);
    CHECK(back.grid.L == 5.0);

    auto partial = SuiteConfig::from_json(nlohmann::json{{"seed", 3}});
    CHECK(partial.seed == 3);
    CHECK(partial.grid.N == default_grid(2).N);
}

TEST_CASE("ucp demos on small examples") {
    UcpConfig u;
    u.fields = 3;
    SUBCASE("zero field gives zero normal operator") {
        SmoothField z = zero_on(AnalyticField(2, 0), u.U);
        const double x[2] = {0.1, 0.2};
        CHECK(normal_numeric(z, 0, x, sphere_quadrature(2, 16))[0] == 0.0);
    }
    SUBCASE("surgical zeroing vanishes on U and keeps the field far away") {
        auto g = random_outside_field(0, u.U, 5);
        auto f = zero_on(g, u.U);
        const double in[2] = {0.5, 0.3}, out[2] = {2.5, 0.0};
        CHECK(f(in)[0] == 0.0);
        CHECK(f(out)[0] == g(out)[0]);
        CHECK(smooth_step(-1) == 0.0);
        CHECK(smooth_step(0.5) == doctest::Approx(0.5));
        CHECK(smooth_step(2) == 1.0);
    }
    SUBCASE("single off-U bump: normal operator is nonlocal") {
        const double c[2] = {2.5, 0.0};
        AnalyticField g(2, 0);
        g[0] = AnalyticScalar::gaussian(2, c, 1.0);
        auto f = zero_on(g, u.U);
        const double x[2] = {0, 0};
        const double v = normal_numeric(f, 0, x, sphere_quadrature(2, 32))[0];
        CHECK(std::abs(v) > 1e-3 * sup_norm(f));
    }
    SUBCASE("derivative stencil recovers a polynomial") {
        auto d = derivatives_at_zero([](double t) { return 1 + 2 * t + 3 * t * t * t; }, 0.1);
        CHECK(d[0] == doctest::Approx(1));
        CHECK(d[1] == doctest::Approx(2));
        CHECK(d[3] == doctest::Approx(18));
        CHECK(std::abs(d[4]) < 1e-6);
    }
    SUBCASE("margins are deterministic") {
        auto a = normal_margins(u), b = normal_margins(u);
        CHECK(a.margins == b.margins);
        CHECK(a.violations == 0);
        CHECK(a.fields == 3);
    }
    SUBCASE("invalid s") {
        CHECK_THROWS_AS(antilocality_margins(0.75, u), std::invalid_argument);
        CHECK_THROWS_AS(antilocality_margins(0.0, u), std::invalid_argument);
    }
}
