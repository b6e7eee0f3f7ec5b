// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 when any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pluri/catalogue.hpp"
#include "pluri/envelope.hpp"
#include "pluri/geodesic.hpp"
#include "pluri/psh.hpp"
#include "pluri/radial.hpp"
#include "pluri/scenario.hpp"
#include "pluri/suites.hpp"
#include "pluri/tolerances.hpp"

#ifndef PLURI_SCENARIO_DIR
#define PLURI_SCENARIO_DIR "scenarios"
#endif

using namespace pluri;

namespace {

constexpr double pi = std::numbers::pi;

// Pinned tolerances and limits.
constexpr double kMass1Rel = 0.05;
constexpr double kMass2Rel = 0.08;
constexpr double kContactRel = 1e-3;
constexpr double kClosedForm = 0.05;
constexpr double kRadialSlice = 1e-3;
constexpr int kN1 = 65;   // n = 1 suite resolution
constexpr int kN2 = 21;   // n = 2 suite resolution
constexpr int kGeo = 33;  // geodesic resolution

struct Verdict {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
    char b[64];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

void append(Verdict& v, const std::string& s) {
    if (!v.detail.empty()) v.detail += "; ";
    v.detail += s;
}

// Folds a suite into a verdict, listing failing checks.
void absorb(Verdict& v, const std::string& label, const SuiteReport& r) {
    int bad = 0;
    std::string first;
    for (const auto& c : r.checks)
        if (!c.pass) {
            if (bad++ == 0) first = c.name + " value " + fmt("%.3g", c.value) + " tol " + fmt("%.3g", c.tol);
        }
    v.pass = v.pass && bad == 0;
    std::string s = label + " " + std::to_string(r.checks.size() - static_cast<std::size_t>(bad)) + "/" +
                    std::to_string(r.checks.size());
    if (bad) s += " (first failure: " + first + ")";
    append(v, s);
}

FunctionSpec green_spec() {
    FunctionSpec g;
    g.kind = "green";
    return g;
}

FunctionSpec truncated_green(double level) {
    FunctionSpec t;
    t.kind = "truncate";
    t.level = level;
    t.args = {green_spec()};
    return t;
}

Verdict crit1() {
    Verdict v;
    auto t0 = Clock::now();
    auto g1 = make_grid(make_domain(DomainKind::ball, 1), 129);
    double m1 = ma_measure(build_function(truncated_green(4.0), g1)).total_mass();
    double s1 = seconds_since(t0);
    double e1 = std::abs(m1 / (2 * pi) - 1.0);
    v.pass = e1 < kMass1Rel && s1 < 1.0;
    append(v, "n=1 129^2 mass " + fmt("%.5f", m1) + " rel " + fmt("%.4f", e1) + " in " + fmt("%.2f", s1) + " s");

    t0 = Clock::now();
    auto g2 = make_grid(make_domain(DomainKind::ball, 2), 21);
    double m2 = ma_measure(build_function(truncated_green(4.0), g2)).total_mass();
    double s2 = seconds_since(t0);
    double e2 = std::abs(m2 / (4 * pi * pi) - 1.0);
    v.pass = v.pass && e2 < kMass2Rel && s2 < 120.0;
    append(v, "n=2 21^4 mass " + fmt("%.4f", m2) + " rel " + fmt("%.4f", e2) + " in " + fmt("%.1f", s2) + " s");
    return v;
}

Verdict crit2() {
    Verdict v;
    auto t0 = Clock::now();
    Domain d = make_domain(DomainKind::ball, 1);
    auto g = make_grid(d, kN1);
    auto obstacles = catalogue_obstacles(d);
    double worst = 0.0;
    int k = 0;
    for (const auto& list : obstacles) {
        std::vector<GridFunction> fs;
        for (const auto& f : list) fs.push_back(build_function(f, g));
        std::vector<std::pair<const GridFunction*, double>> terms;
        double scale = 0.0;
        for (const auto& f : fs) {
            terms.push_back({&f, 0.0});
            scale = std::max(scale, data_scale(f));
        }
        Obstacle h = Obstacle::min_of(terms);
        GridFunction P = envelope(h);
        MeasureField mu = regular_part(P);
        double total = mu.total_mass() + singular_part(P).singular_mass();
        double off = 0.0;
        double eps = tol::contact(scale);
        for (std::size_t i = 0; i < g->size(); ++i) {
            if (P.is_carrier(i)) continue;
            double hi = INFINITY;
            for (const auto& f : fs) hi = std::min(hi, f.value(i));
            if (P.value(i) < hi - eps) off += mu.cell_mass(i);
        }
        double ratio = total > 0 ? off / total : off;
        worst = std::max(worst, ratio);
        if (!(ratio < kContactRel)) {
            v.pass = false;
            append(v, "obstacle " + std::to_string(k) + " off-contact fraction " + fmt("%.3g", ratio));
        }
        ++k;
    }
    double s = seconds_since(t0);
    v.pass = v.pass && k == 10 && s < 10.0;
    append(v, std::to_string(k) + " obstacles, worst off-contact fraction " + fmt("%.3g", worst) + " in " +
                  fmt("%.1f", s) + " s");
    return v;
}

SuiteConfig config(int n, int resolution, int count) {
    SuiteConfig c;
    c.domain = make_domain(DomainKind::ball, n);
    c.resolution = resolution;
    c.count = count;
    return c;
}

Verdict timed_suites(const std::vector<std::pair<std::string, std::function<SuiteReport()>>>& runs, double limit) {
    Verdict v;
    auto t0 = Clock::now();
    for (const auto& [label, run] : runs) absorb(v, label, run());
    double s = seconds_since(t0);
    v.pass = v.pass && s < limit;
    append(v, fmt("%.1f s", s));
    return v;
}

Verdict crit4() {
    Verdict v;
    auto t0 = Clock::now();
    auto g = make_grid(make_domain(DomainKind::ball, 2), kN2);
    FunctionSpec f;
    f.kind = "log_coordinate";
    GridFunction gu = residual(build_function(f, g));
    auto mask = g->exhaustion_mask(2);
    double worst = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        if (!mask[i] || gu.is_carrier(i)) continue;
        const Point& x = g->point(i);
        double exact = std::log(std::hypot(x[0], x[1])) - 0.5 * std::log(1.0 - x[2] * x[2] - x[3] * x[3]);
        worst = std::max(worst, std::abs(gu.value(i) - exact));
    }
    double s = seconds_since(t0);
    v.pass = worst < kClosedForm && s < 600.0;
    append(v, "sup error " + fmt("%.3g", worst) + " on the level-2 nodes at 21^4 in " + fmt("%.1f", s) + " s");
    return v;
}

Verdict crit8() {
    Verdict v;
    auto t0 = Clock::now();
    auto g = make_grid(make_domain(DomainKind::ball, 1), kGeo);
    int agree = 0, k = 0;
    double worst_gap = 0.0;
    for (const auto& p : designed_pairs()) {
        GridFunction u0 = build_function(p.u0, g), u1 = build_function(p.u1, g);
        ConnectivityReport r = connectivity_test(u0, u1);
        agree += r.agree;
        if (!r.agree) append(v, "pair " + std::to_string(k) + " verdicts disagree");
        if (r.verdict_residual != p.connectable) append(v, "pair " + std::to_string(k) + " residual verdict wrong");
        v.pass = v.pass && r.agree && r.verdict_residual == p.connectable;
        if (p.connectable) {
            double gap = std::max(r.gap0, r.gap1);
            worst_gap = std::max(worst_gap, gap);
            if (!(gap < r.gap_tol)) {
                v.pass = false;
                append(v, "pair " + std::to_string(k) + " endpoint gap " + fmt("%.3g", gap) + " tol " + fmt("%.3g", r.gap_tol));
            }
        }
        ++k;
    }
    // radial slices of the pole pair against the Legendre interpolation
    GridFunction a = build_function(green_spec(), g);
    FunctionSpec m;
    m.kind = "max";
    FunctionSpec c;
    c.kind = "const";
    c.value = -1.0;
    m.args = {green_spec(), c};
    GridFunction b = build_function(m, g);
    GeodesicField V = largest_geodesic(a, b, 16);
    RadialProfile p0 = make_profile([](double s) { return s; });
    RadialProfile p1 = make_profile([](double s) { return std::max(s, -1.0); });
    double slice = 0.0;
    for (int j = 1; j < V.m; ++j)
        slice = std::max(slice, radial_sup_gap(V.slice(j), radial_geodesic(p0, p1, V.t[static_cast<std::size_t>(j)])));
    v.pass = v.pass && slice < kRadialSlice;
    double s = seconds_since(t0);
    v.pass = v.pass && k == 8 && s < 600.0;
    append(v, std::to_string(agree) + "/" + std::to_string(k) + " pairs agree, worst connectable gap " + fmt("%.3g", worst_gap) +
                  ", radial slice gap " + fmt("%.3g", slice) + " in " + fmt("%.1f", s) + " s");
    return v;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict crit10() {
    Verdict v;
    auto root = std::filesystem::temp_directory_path() / "pluri_acceptance_determinism";
    std::filesystem::remove_all(root);
    int n = 0;
    for (const char* name : {"idempotency_n1", "dirichlet_random", "geodesic_pole_pair", "envelope_min"}) {
        Scenario sc = load_scenario(std::filesystem::path(PLURI_SCENARIO_DIR) / (std::string(name) + ".json"));
        run_scenario(sc, root / "a" / name);
        run_scenario(sc, root / "b" / name);
        std::string ra = slurp(root / "a" / name / "report.json"), rb = slurp(root / "b" / name / "report.json");
        bool same = !ra.empty() && ra == rb;
        // data files are deterministic too
        for (const auto& e : std::filesystem::directory_iterator(root / "a" / name)) {
            auto fname = e.path().filename();
            if (fname == "timings.json") continue;
            same = same && slurp(e.path()) == slurp(root / "b" / name / fname);
        }
        if (!same) {
            v.pass = false;
            append(v, std::string(name) + " differs");
        }
        ++n;
    }
    std::filesystem::remove_all(root);
    append(v, std::to_string(n) + " scenarios re-run byte-identically (report and data files)");
    return v;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<Verdict()> run;
    };
    std::vector<Criterion> all = {
        {1, "Green-function calibration", crit1},
        {2, "envelope contact", crit2},
        {3, "residual properties",
         [] { return timed_suites({{"n=1 65^2", [] { return residual_suite(config(1, kN1, 10)); }}}, 30.0); }},
        {4, "closed-form residual of log|z_1|", crit4},
        {5, "rooftop equality and idempotency",
         [] {
             return timed_suites({{"rooftop-equality n=1 20 pairs", [] { return verify_theorem("rooftop-equality", config(1, kN1, 20)); }},
                                  {"idempotency n=1 20 cases", [] { return verify_theorem("idempotency", config(1, kN1, 20)); }},
                                  {"rooftop-equality n=2 6 pairs", [] { return verify_theorem("rooftop-equality", config(2, kN2, 6)); }},
                                  {"idempotency n=2 6 cases", [] { return verify_theorem("idempotency", config(2, kN2, 6)); }}},
                                 300.0);
         }},
        {6, "comparison principle",
         [] { return timed_suites({{"n=1 20 pairs", [] { return verify_theorem("uniqueness", config(1, kN1, 20)); }}}, 300.0); }},
        {7, "decomposition",
         [] { return timed_suites({{"n=1 10 inputs", [] { return verify_theorem("decomposition", config(1, kN1, 10)); }}}, 300.0); }},
        {8, "geodesic connectivity", crit8},
        {9, "radial-oracle agreement",
         [] { return timed_suites({{"n=1 65^2", [] { return radial_suite(config(1, kN1, 10)); }}}, 120.0); }},
        {10, "determinism", crit10},
    };
    int failed = 0;
    for (const auto& c : all) {
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("error: ") + e.what();
        }
        failed += !v.pass;
        std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.title, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed ? 1 : 0;
}
