#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pluri/error.hpp"
#include "pluri/io.hpp"
#include "pluri/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct Job {
    fs::path config;
    int code = kUsage;
    std::string log;
};

void run_job(Job& job, const fs::path& out_override) {
    std::ostringstream os;
    try {
        pluri::Scenario sc = pluri::load_scenario(job.config);
        fs::path dir = (out_override.empty() ? pluri::output_root() : out_override) / sc.name;
        pluri::ScenarioOutcome out = pluri::run_scenario(sc, dir);
        for (const auto& r : out.runs)
            for (const auto& c : r.checks)
                os << (c.pass ? "PASS " : "FAIL ") << sc.name << " N=" << r.resolution << " " << c.name
                   << " value=" << c.value << " tol=" << c.tol << (c.detail.empty() ? "" : "  (" + c.detail + ")") << '\n';
        if (!out.error.empty()) os << "error: " << out.error << '\n';
        os << sc.name << ": " << (out.pass ? "pass" : "FAIL") << ", report in " << (dir / "report.json").string() << '\n';
        job.code = out.exit_code();
    } catch (const pluri::SchemaError& e) {
        os << job.config.string() << ": schema error: " << e.what() << '\n';
        job.code = kUsage;
    } catch (const std::exception& e) {
        os << job.config.string() << ": error: " << e.what() << '\n';
        job.code = kFail;
    }
    job.log = os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete pluripotential theory experiments"};
    app.require_subcommand(1);
    fs::path out;
    app.add_option("--out", out, "Output root (default: $PLURI_OUT or ./pluri_out)");

    auto* run = app.add_subcommand("run", "Run scenario configs");
    std::vector<std::string> configs;
    int jobs = 1;
    run->add_option("config", configs, "Scenario JSON files")->required()->check(CLI::ExistingFile);
    run->add_option("-j,--jobs", jobs, "Independent scenarios to run in parallel")->check(CLI::PositiveNumber);

    auto* cal = app.add_subcommand("calibrate", "Green-function mass calibration");
    std::vector<int> dims;
    cal->add_option("--n", dims, "Dimensions to calibrate (default 1 2)")->check(CLI::IsMember({1, 2}));

    auto* list = app.add_subcommand("list-theorems", "List theorem tags and the invariants they check");

    auto* exp = app.add_subcommand("export", "Export a binary grid");
    std::string grid_path, csv_out;
    bool csv = false;
    exp->add_option("grid", grid_path, "PLRG file")->required()->check(CLI::ExistingFile);
    exp->add_flag("--csv", csv, "Write CSV (the only export format)")->required();
    exp->add_option("-o,--output", csv_out, "CSV file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    if (*list) {
        for (const auto& t : pluri::theorem_tags()) std::cout << t << '\t' << pluri::theorem_invariant(t) << '\n';
        return kPass;
    }

    if (*exp) {
        try {
            pluri::GridFunction u = pluri::load_grid(grid_path);
            if (csv_out.empty()) {
                pluri::write_grid_csv(std::cout, u);
            } else {
                std::ofstream os(csv_out);
                if (!os) throw pluri::Error("cannot open '" + csv_out + "' for writing");
                pluri::write_grid_csv(os, u);
            }
        } catch (const std::exception& e) {
            std::cerr << "export: " << e.what() << '\n';
            return kUsage;
        }
        return kPass;
    }

    if (*cal) {
        if (dims.empty()) dims = {1, 2};
        std::sort(dims.begin(), dims.end());
        dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
        fs::path dir = (out.empty() ? pluri::output_root() : out) / "calibration";
        pluri::CalibrationReport r = pluri::calibrate(dir, dims);
        std::printf("%-3s %-6s %-10s %-14s %-14s %-12s %s\n", "n", "N", "h", "mass", "exact", "rel_error", "order");
        for (const auto& row : r.rows)
            std::printf("%-3d %-6d %-10.5g %-14.8g %-14.8g %-12.4g %s\n", row.n, row.resolution, row.h, row.mass, row.exact,
                        row.rel_error, row.order == 0.0 ? "-" : std::to_string(row.order).c_str());
        std::printf("calibration table in %s\n", (dir / "calibration.json").string().c_str());
        return kPass;
    }

    std::vector<Job> work(configs.size());
    for (std::size_t k = 0; k < configs.size(); ++k) work[k].config = configs[k];
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < work.size();) run_job(work[k], out);
    };
    const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(work.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int code = kPass;
    for (const auto& job : work) {
        std::cout << job.log;
        if (job.code == kUsage) code = kUsage;
        else if (job.code == kFail && code == kPass) code = kFail;
    }
    return code;
}
