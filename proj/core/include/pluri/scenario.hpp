#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pluri/catalogue.hpp"
#include "pluri/dirichlet.hpp"
#include "pluri/suites.hpp"

namespace pluri {

// Overrides of the default tolerances; 0 keeps the default.
struct ScenarioTolerances {
    double env = 0.0;
    double mass = 0.0;
    double res = 0.0;
    double comp = 0.0;
    double gap_factor = 10.0;
};

// Target measure of a dirichlet experiment: a seeded random measure, or the
// discrete MA measure of a catalogue function (density and atoms).
struct MeasureSpec {
    std::string kind = "random";  // random | ma_of
    ProblemSpec problem;
    std::optional<FunctionSpec> source;
    double density_scale = 1.0;
};

// Optional expected outcomes turned into extra checks.
struct Expectation {
    std::optional<double> total_mass;
    double mass_rel_tol = 0.05;
    std::optional<bool> connectable;
    std::optional<FunctionSpec> reference;  // compared with the result in sup norm
    double reference_tol = 0.0;             // 0: 10 tol_env
    bool radial_oracle = false;             // cross-check radial inputs against the 1D code
    // Named closed-form residual: "log_coordinate_ball" is log(|z_1| / sqrt(1 - |z_2|^2))
    // on the unit ball of C^2 (sup over the level-2 subdomain, default tol 0.05).
    std::string closed_form;
};

struct Scenario {
    std::string name;
    std::string experiment;  // ma | envelope | rooftop | residual | geodesic | decompose | dirichlet | verify-theorem
    std::string theorem;     // verify-theorem only
    Domain domain;
    std::vector<int> resolutions{33};
    std::optional<FunctionSpec> u, v;
    MeasureSpec measure;
    std::optional<FunctionSpec> boundary;
    int m = 16;
    std::uint64_t seed = 7;
    int count = 10;
    ScenarioTolerances tolerances;
    Expectation expect;
    bool write_csv = true;
    bool write_grids = true;
};

const std::vector<std::string>& experiment_names();

// Parses a JSON scenario. Throws SchemaError with "line L, column C" for
// syntax errors and the dotted field path otherwise. Relative csv profile
// paths resolve against base_dir.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

struct RunRecord {
    int resolution = 0;
    std::vector<std::pair<std::string, double>> quantities;
    std::vector<CheckResult> checks;
    std::vector<std::string> files;
    double seconds = 0.0;
};

struct ScenarioOutcome {
    std::string name;
    std::vector<RunRecord> runs;
    bool pass = false;
    std::string error;  // module error text, empty on success
    std::filesystem::path directory;

    // 0 when every check passes, 1 otherwise.
    int exit_code() const { return pass ? 0 : 1; }
};

// Output root: $PLURI_OUT when set, ./pluri_out otherwise.
std::filesystem::path output_root();

// Runs every resolution of the scenario and writes report.json (deterministic
// for a fixed config), timings.json (runtimes and timestamp), CSV data and
// binary grids into dir. Module errors are caught, reported with the
// experiment and resolution as context and make the outcome fail.
ScenarioOutcome run_scenario(const Scenario& sc, const std::filesystem::path& dir);

// Deterministic JSON report of an outcome (the content of report.json).
std::string report_json(const Scenario& sc, const ScenarioOutcome& out);

struct CalibrationRow {
    int n = 1;
    int resolution = 0;
    double h = 0.0;
    double mass = 0.0;
    double exact = 0.0;
    double rel_error = 0.0;
    double order = 0.0;  // observed order against the previous row (0 for the first)
    double seconds = 0.0;
};

struct CalibrationReport {
    std::vector<CalibrationRow> rows;
    std::string json;  // calibration table without runtimes
};

// Green-function mass test: max(log|z|, -4) on the unit ball at resolutions
// {65, 129, 257} (n = 1, on its discrete psh projection since the sampled
// kink fails the cone test at 65^2) and {13, 17, 21} (n = 2, sampled). Writes calibration.json
// and timings.json into dir when dir is not empty.
CalibrationReport calibrate(const std::filesystem::path& dir, const std::vector<int>& dims = {1, 2});

}  // namespace pluri
