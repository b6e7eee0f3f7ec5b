#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pluri/error.hpp"
#include "pluri/scenario.hpp"
#include "pluri/suites.hpp"

using namespace pluri;

namespace {
const char* kEnvelope = R"({
  "name": "env_small",
  "experiment": "envelope",
  "domain": {"kind": "ball", "n": 1},
  "resolution": 17,
  "functions": {"u": {"kind": "green", "at": [0.25, 0.0]}, "v": {"kind": "quadratic"}}
})";

std::string field_of(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const SchemaError& e) {
        return e.field();
    }
    return "";
}

std::string with(const std::string& key, const std::string& value) {
    std::string s = kEnvelope;
    return s.substr(0, s.rfind('}')) + ", \"" + key + "\": " + value + "}";
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("pluri_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("a valid scenario parses with defaults") {
    Scenario sc = parse_scenario(kEnvelope);
    CHECK(sc.name == "env_small");
    CHECK(sc.experiment == "envelope");
    CHECK(sc.domain.n == 1);
    CHECK(sc.resolutions == std::vector<int>{17});
    REQUIRE(sc.u.has_value());
    CHECK(sc.u->kind == "green");
    CHECK(sc.u->at[0] == 0.25);
    CHECK(sc.seed == 7);
    CHECK(sc.write_csv);
}

TEST_CASE("schema errors name the offending field") {
    CHECK(field_of(with("bogus", "1")) == "bogus");
    CHECK(field_of(with("seed", "-1")) == "seed");
    CHECK(field_of(with("tolerances", R"({"env": "x"})")) == "tolerances.env");
    std::string bad_kind = kEnvelope;
    bad_kind.replace(bad_kind.find("\"quadratic\""), 11, "\"cubic\"");
    CHECK(field_of(bad_kind) == "functions.v.kind");
    std::string bad_res = kEnvelope;
    bad_res.replace(bad_res.find("17"), 2, "5");
    CHECK(field_of(bad_res) == "resolution");
    std::string bad_at = kEnvelope;
    bad_at.replace(bad_at.find("[0.25, 0.0]"), 11, "[0.25]");
    CHECK(field_of(bad_at) == "functions.u.at");
    std::string bad_exp = kEnvelope;
    bad_exp.replace(bad_exp.find("\"envelope\""), 10, "\"magic\"");
    CHECK(field_of(bad_exp) == "experiment");
    CHECK(field_of(R"({"name": "t", "experiment": "verify-theorem", "theorem": "nope", "domain": {"kind": "ball", "n": 1}})") ==
          "theorem");
    CHECK(field_of(R"({"name": "t", "experiment": "envelope", "domain": {"kind": "ball", "n": 3}, "functions": {"u": {"kind": "green"}}})") ==
          "domain.n");
}

TEST_CASE("syntax errors report line and column") {
    try {
        parse_scenario("{\n  \"name\": \"x\",\n  \"experiment\" \"ma\"\n}");
        FAIL("expected a SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.field()).rfind("line 3, column", 0) == 0);
    }
}

TEST_CASE("every theorem tag maps to an invariant") {
    for (const auto& t : theorem_tags()) CHECK_FALSE(theorem_invariant(t).empty());
    CHECK(std::find(theorem_tags().begin(), theorem_tags().end(), "conjecture-4.1") != theorem_tags().end());
    CHECK_THROWS_AS(verify_theorem("nope", SuiteConfig{}), InvalidArgument);
}

TEST_CASE("run_scenario writes a deterministic report") {
    Scenario sc = parse_scenario(kEnvelope);
    auto a = scratch("a"), b = scratch("b");
    ScenarioOutcome oa = run_scenario(sc, a);
    ScenarioOutcome ob = run_scenario(sc, b);
    CHECK(oa.pass);
    CHECK(oa.exit_code() == 0);
    CHECK(oa.error.empty());
    REQUIRE(std::filesystem::exists(a / "report.json"));
    CHECK(std::filesystem::exists(a / "timings.json"));
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(report_json(sc, oa) == slurp(a / "report.json"));
    REQUIRE(oa.runs.size() == 1);
    CHECK_FALSE(oa.runs[0].files.empty());
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST_CASE("module errors fail the outcome with context") {
    // a hyperplane pole has no Monge-Ampere measure
    Scenario sc = parse_scenario(R"({
      "name": "ma_hyperplane", "experiment": "ma",
      "domain": {"kind": "ball", "n": 2}, "resolution": 9,
      "functions": {"u": {"kind": "log_coordinate", "coordinate": 1}}
    })");
    auto d = scratch("err");
    ScenarioOutcome o = run_scenario(sc, d);
    CHECK_FALSE(o.pass);
    CHECK(o.exit_code() == 1);
    CHECK(o.error.find("resolution 9") != std::string::npos);
    std::filesystem::remove_all(d);
}

TEST_CASE("failing expectations fail the outcome") {
    Scenario sc = parse_scenario(R"({
      "name": "ma_wrong_mass", "experiment": "ma",
      "domain": {"kind": "ball", "n": 1}, "resolution": 17,
      "functions": {"u": {"kind": "green"}},
      "expect": {"total_mass": 1.0}
    })");
    auto d = scratch("fail");
    ScenarioOutcome o = run_scenario(sc, d);
    CHECK_FALSE(o.pass);
    CHECK(o.error.empty());
    std::filesystem::remove_all(d);
}
