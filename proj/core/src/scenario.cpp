#include "pluri/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pluri/error.hpp"
#include "pluri/geodesic.hpp"
#include "pluri/io.hpp"
#include "pluri/radial.hpp"
#include "pluri/tolerances.hpp"

namespace pluri {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// ---- schema parsing ------------------------------------------------------

std::string key_path(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw SchemaError(path.empty() ? "<root>" : path, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; });
        if (!ok) throw SchemaError(key_path(path, it.key()), "unknown field");
    }
}

double get_number(const json& j, const std::string& path, const char* key, double def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number()) throw SchemaError(key_path(path, key), "expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) throw SchemaError(key_path(path, key), "expected a finite number");
    return x;
}

double get_positive(const json& j, const std::string& path, const char* key, double def) {
    double x = get_number(j, path, key, def);
    if (j.contains(key) && !(x > 0.0)) throw SchemaError(key_path(path, key), "must be positive");
    return x;
}

long long get_int(const json& j, const std::string& path, const char* key, long long def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw SchemaError(key_path(path, key), "expected an integer");
    return v.get<long long>();
}

std::string get_string(const json& j, const std::string& path, const char* key, const std::string& def,
                       bool required = false) {
    if (!j.contains(key)) {
        if (required) throw SchemaError(key_path(path, key), "required field missing");
        return def;
    }
    const json& v = j.at(key);
    if (!v.is_string()) throw SchemaError(key_path(path, key), "expected a string");
    return v.get<std::string>();
}

bool get_bool(const json& j, const std::string& path, const char* key, bool def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_boolean()) throw SchemaError(key_path(path, key), "expected true or false");
    return v.get<bool>();
}

void require_kind(const std::string& kind, const std::vector<std::string>& kinds, const std::string& path) {
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
        std::string list;
        for (const auto& k : kinds) list += (list.empty() ? "" : ", ") + k;
        throw SchemaError(key_path(path, "kind"), "unknown kind '" + kind + "' (expected one of " + list + ")");
    }
}

ProfileSpec parse_profile(const json& j, const std::string& path, const fs::path& base) {
    check_keys(j, path, {"kind", "c", "value", "k", "a", "path", "args"});
    ProfileSpec p;
    p.kind = get_string(j, path, "kind", "", true);
    require_kind(p.kind, profile_kinds(), path);
    p.c = get_number(j, path, "c", p.c);
    p.value = get_number(j, path, "value", p.value);
    p.k = get_number(j, path, "k", p.k);
    p.a = get_number(j, path, "a", p.a);
    p.path = get_string(j, path, "path", "");
    if (!p.path.empty() && fs::path(p.path).is_relative() && !base.empty()) p.path = (base / p.path).string();
    if (p.kind == "csv" && p.path.empty()) throw SchemaError(key_path(path, "path"), "csv profile needs a path");
    if (j.contains("args")) {
        const json& a = j.at("args");
        if (!a.is_array()) throw SchemaError(key_path(path, "args"), "expected an array");
        for (std::size_t k = 0; k < a.size(); ++k)
            p.args.push_back(parse_profile(a[k], key_path(path, "args") + "[" + std::to_string(k) + "]", base));
    }
    return p;
}

FunctionSpec parse_function(const json& j, const std::string& path, const Domain& d, const fs::path& base) {
    check_keys(j, path, {"kind", "value", "c", "factor", "level", "at", "coordinate", "a", "profile", "args"});
    FunctionSpec f;
    f.kind = get_string(j, path, "kind", "", true);
    require_kind(f.kind, function_kinds(), path);
    f.value = get_number(j, path, "value", f.value);
    f.c = get_number(j, path, "c", f.c);
    f.factor = get_number(j, path, "factor", f.factor);
    f.level = get_number(j, path, "level", f.level);
    if (j.contains("at")) {
        const json& a = j.at("at");
        const std::string ap = key_path(path, "at");
        if (!a.is_array() || a.size() != static_cast<std::size_t>(d.real_dim()))
            throw SchemaError(ap, "expected " + std::to_string(d.real_dim()) + " real coordinates");
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (!a[k].is_number()) throw SchemaError(ap + "[" + std::to_string(k) + "]", "expected a number");
            f.at[k] = a[k].get<double>();
        }
    }
    if (j.contains("coordinate")) {
        long long c = get_int(j, path, "coordinate", 1);
        if (c < 1 || c > d.n) throw SchemaError(key_path(path, "coordinate"), "must be between 1 and n");
        f.axis = static_cast<int>(c - 1);
    }
    if (j.contains("a")) {
        const json& a = j.at("a");
        if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
            throw SchemaError(key_path(path, "a"), "expected [re, im]");
        f.a_re = a[0].get<double>();
        f.a_im = a[1].get<double>();
    }
    if (j.contains("profile")) f.profile = parse_profile(j.at("profile"), key_path(path, "profile"), base);
    else if (f.kind == "radial") throw SchemaError(key_path(path, "profile"), "required field missing");
    if (j.contains("args")) {
        const json& a = j.at("args");
        if (!a.is_array()) throw SchemaError(key_path(path, "args"), "expected an array");
        for (std::size_t k = 0; k < a.size(); ++k)
            f.args.push_back(parse_function(a[k], key_path(path, "args") + "[" + std::to_string(k) + "]", d, base));
    }
    return f;
}

std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

bool needs_u(const std::string& e) { return e != "dirichlet" && e != "verify-theorem"; }
bool needs_v(const std::string& e) { return e == "rooftop" || e == "geodesic"; }

// ---- running -------------------------------------------------------------

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

CheckResult below(std::string name, double value, double tol, std::string detail = {}) {
    CheckResult c;
    c.name = std::move(name);
    c.value = value;
    c.tol = tol;
    c.pass = value < tol;
    c.detail = std::move(detail);
    return c;
}

CheckResult flag(std::string name, bool ok, std::string detail = {}) {
    CheckResult c;
    c.name = std::move(name);
    c.pass = ok;
    c.value = ok ? 0.0 : 1.0;
    c.tol = 0.5;
    c.detail = std::move(detail);
    return c;
}

struct Run {
    const Scenario& sc;
    GridPtr grid;
    EnvelopeOptions eo;
    const fs::path& dir;
    RunRecord rec;

    GridFunction build(const FunctionSpec& f, const char* name) const { return build_function(f, grid, name, eo); }
    int n() const { return grid->n(); }
    double tol_env(double scale) const { return sc.tolerances.env > 0.0 ? sc.tolerances.env : tol::env(scale); }
    double tol_mass() const { return sc.tolerances.mass > 0.0 ? sc.tolerances.mass : tol::mass(n()); }
    double tol_res() const { return sc.tolerances.res > 0.0 ? sc.tolerances.res : tol::res(n()); }

    std::string stem(const std::string& what) const { return "N" + std::to_string(grid->resolution()) + "_" + what; }

    void quantity(const std::string& k, double v) { rec.quantities.emplace_back(k, v); }

    void csv_grid(const std::string& what, const GridFunction& u) {
        if (!sc.write_csv) return;
        std::string f = stem(what) + ".csv";
        std::ofstream os(dir / f);
        write_grid_csv(os, u);
        rec.files.push_back(f);
    }
    void csv_measure(const std::string& what, const MeasureField& mu) {
        if (!sc.write_csv) return;
        std::string f = stem(what) + ".csv";
        std::ofstream os(dir / f);
        write_measure_csv(os, mu);
        rec.files.push_back(f);
    }
    void binary(const std::string& what, const GridFunction& u) {
        if (!sc.write_grids) return;
        std::string f = stem(what) + ".plrg";
        save_grid((dir / f).string(), u);
        std::ofstream(dir / (f + ".json")) << grid_sidecar_json(u, f) << '\n';
        rec.files.push_back(f);
        rec.files.push_back(f + ".json");
    }

    void reference_check(const GridFunction& result, double tol_default) {
        if (!sc.expect.reference) return;
        GridFunction ref = build(*sc.expect.reference, "expect.reference");
        double tol = sc.expect.reference_tol > 0.0 ? sc.expect.reference_tol : tol_default;
        double d = sup_distance(result, ref);
        rec.checks.push_back(below("reference", d, tol, "sup|result - " + describe(*sc.expect.reference) + "|"));
    }

    std::optional<RadialProfile> radial(const FunctionSpec& f) const {
        if (!sc.expect.radial_oracle) return std::nullopt;
        RadialProfile p;
        if (!radial_profile_of(f, grid->domain(), &p)) return std::nullopt;
        return p;
    }

    // Common checks of an envelope result against the pointwise obstacle
    // values h (min of the inputs).
    void envelope_checks(const GridFunction& P, const std::vector<double>& h, double tol) {
        double excess = 0.0;
        for (std::size_t i = 0; i < P.size(); ++i)
            if (!P.is_carrier(i) && std::isfinite(h[i])) excess = std::max(excess, P.value(i) - h[i]);
        rec.checks.push_back(below("below obstacle", excess, tol, "max(P - h) over non-carrier nodes"));
        PshReport pr = is_psh(P, tol::class_factor * tol);
        rec.checks.push_back(flag("psh", pr.verdict, "worst line excess " + fmt(pr.worst)));
        MeasureField mu = regular_part(P);
        const double eps = tol::contact_factor * tol;
        double off = 0.0;
        for (std::size_t i = 0; i < P.size(); ++i)
            if (!P.is_carrier(i) && P.value(i) < h[i] - eps) off += mu.cell_mass(i);
        rec.checks.push_back(below("contact", off, tol_mass(), "regular mass where P < h - " + fmt(eps)));
        quantity("regular_mass", mu.regular_mass());
        quantity("off_contact_mass", off);
    }

    void run_ma() {
        GridFunction u = build(*sc.u, "functions.u");
        MeasureField mu = ma_measure(u);
        quantity("total_mass", mu.total_mass());
        quantity("regular_mass", mu.regular_mass());
        quantity("singular_mass", mu.singular_mass());
        quantity("atoms", static_cast<double>(mu.atoms.size()));
        if (sc.expect.total_mass) {
            double e = *sc.expect.total_mass;
            rec.checks.push_back(below("total mass", std::abs(mu.total_mass() - e) / std::abs(e), sc.expect.mass_rel_tol,
                                       "grid " + fmt(mu.total_mass()) + " vs expected " + fmt(e)));
        }
        if (auto p = radial(*sc.u)) {
            double exact = radial_ma_mass(*p, 1.0, n());
            rec.checks.push_back(below("radial mass", std::abs(mu.total_mass() - exact) / exact, sc.expect.mass_rel_tol,
                                       "grid " + fmt(mu.total_mass()) + " vs radial " + fmt(exact)));
        }
        rec.checks.push_back(flag("measure", std::isfinite(mu.total_mass()), "ma_measure accepted the input"));
        csv_measure("measure", mu);
        csv_grid("u", u);
    }

    void run_envelope() {
        GridFunction u = build(*sc.u, "functions.u");
        std::optional<GridFunction> v;
        if (sc.v) v = build(*sc.v, "functions.v");
        Obstacle h = v ? Obstacle::min_of({{&u, 0.0}, {&*v, 0.0}}) : Obstacle::from(u);
        EnvelopeOptions o = eo;
        o.tol = tol_env(h.data_scale());
        EnvelopeStats st;
        GridFunction P = envelope(h, o, &st);
        quantity("sweeps", st.sweeps);
        quantity("tol_env", o.tol);
        std::vector<double> hv(P.size());
        for (std::size_t i = 0; i < hv.size(); ++i) hv[i] = v ? std::min(u.value(i), v->value(i)) : u.value(i);
        envelope_checks(P, hv, o.tol);
        reference_check(P, tol::class_factor * o.tol);
        csv_grid("envelope", P);
        binary("envelope", P);
    }

    void run_rooftop() {
        GridFunction u = build(*sc.u, "functions.u"), v = build(*sc.v, "functions.v");
        EnvelopeOptions o = eo;
        o.tol = tol_env(data_scale(u, v));
        GridFunction P = rooftop(u, v, o);
        quantity("tol_env", o.tol);
        std::vector<double> hv(P.size());
        for (std::size_t i = 0; i < hv.size(); ++i) hv[i] = std::min(u.value(i), v.value(i));
        envelope_checks(P, hv, o.tol);
        auto pu = radial(*sc.u), pv = radial(*sc.v);
        if (pu && pv)
            rec.checks.push_back(below("radial rooftop", radial_sup_gap(P, radial_rooftop(*pu, *pv)), o.tol,
                                       "sup|P(u, v) - hull| on nodes"));
        reference_check(P, tol::class_factor * o.tol);
        csv_grid("rooftop", P);
        binary("rooftop", P);
    }

    void run_residual() {
        GridFunction u = build(*sc.u, "functions.u");
        EnvelopeOptions o = eo;
        o.tol = tol_env(data_scale(u));
        AsymptoticReport rep;
        GridFunction g = residual(u, o, &rep);
        quantity("tol_env", o.tol);
        quantity("schedule_steps", static_cast<double>(rep.C.size()));
        rec.checks.push_back(flag("stabilized", rep.stabilized, "C schedule up to " + fmt(rep.C.empty() ? 0.0 : rep.C.back())));
        double excess = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (!u.is_carrier(i) && !g.is_carrier(i)) excess = std::max(excess, u.value(i) - g.value(i));
        rec.checks.push_back(below("u <= g_u", excess, tol::class_factor * o.tol));
        const bool divisor = std::any_of(u.poles().begin(), u.poles().end(),
                                         [](const PoleSpec& p) { return p.model == PoleModel::hyperplane; });
        if (!divisor) {
            double rm = regular_part(g).regular_mass();
            quantity("regular_mass", rm);
            rec.checks.push_back(below("regular mass", rm, tol_mass(), "mass(mu_r(g_u))"));
        }
        if (sc.expect.closed_form == "log_coordinate_ball") {
            // g_u = log(|z_1| / sqrt(1 - |z_2|^2)) for u = log|z_1| on the unit ball of C^2.
            if (grid->domain().kind != DomainKind::ball || n() != 2 || grid->domain().radius != 1.0)
                throw InvalidArgument("closed form log_coordinate_ball needs the unit ball of C^2");
            auto mask = grid->exhaustion_mask(2);
            double worst = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!mask[i] || g.is_carrier(i)) continue;
                double exact = std::log(std::abs(grid->z(i, 0))) - 0.5 * std::log(1.0 - std::norm(grid->z(i, 1)));
                worst = std::max(worst, std::abs(g.value(i) - exact));
            }
            const double tol = sc.expect.reference_tol > 0.0 ? sc.expect.reference_tol : 0.05;
            rec.checks.push_back(below("closed form", worst, tol, "sup over the level-2 subdomain of |g_u - log(|z_1|/sqrt(1 - |z_2|^2))|"));
        }
        if (divisor) return finish_residual(g);
        auto a = u.poles(), b = g.poles();
        sort_poles(a);
        sort_poles(b);
        bool same = a.size() == b.size();
        for (std::size_t k = 0; same && k < a.size(); ++k)
            same = a[k].same_carrier(b[k]) && std::abs(a[k].c - b[k].c) <= 1e-12 * a[k].c;
        rec.checks.push_back(flag("atoms", same, std::to_string(a.size()) + " poles in u, " + std::to_string(b.size()) + " in g_u"));
        if (auto p = radial(*sc.u))
            rec.checks.push_back(below("radial residual", radial_sup_gap(g, radial_residual(*p)), o.tol,
                                       "sup|g_u - radial residual| on nodes"));
        reference_check(g, tol::class_factor * o.tol);
        finish_residual(g);
    }

    void finish_residual(const GridFunction& g) {
        csv_grid("residual", g);
        binary("residual", g);
    }

    void run_geodesic() {
        GridFunction u0 = build(*sc.u, "functions.u"), u1 = build(*sc.v, "functions.v");
        ConnectivityOptions co;
        co.m = sc.m;
        co.gap_factor = sc.tolerances.gap_factor;
        co.envelope = eo;
        if (sc.tolerances.env > 0.0) co.envelope.tol = sc.tolerances.env;
        ConnectivityReport r = connectivity_test(u0, u1, co);
        quantity("gap0", r.gap0);
        quantity("gap1", r.gap1);
        quantity("darvas01", r.darvas01);
        quantity("darvas10", r.darvas10);
        quantity("resid01", r.resid01);
        quantity("resid10", r.resid10);
        quantity("tol_env", r.tol);
        std::string verdicts = std::string("endpoint ") + (r.verdict_endpoint ? "yes" : "no") + ", darvas " +
                               (r.verdict_darvas ? "yes" : "no") + ", residual " + (r.verdict_residual ? "yes" : "no");
        rec.checks.push_back(flag("verdicts agree", r.agree, verdicts));
        if (sc.expect.connectable) {
            bool e = *sc.expect.connectable;
            rec.checks.push_back(flag("residual verdict", r.verdict_residual == e, verdicts));
            rec.checks.push_back(flag("darvas verdict", r.verdict_darvas == e, verdicts));
            rec.checks.push_back(flag("endpoint verdict", r.verdict_endpoint == e,
                                      "gaps " + fmt(r.gap0) + ", " + fmt(r.gap1) + " vs " + fmt(r.gap_tol)));
        }
        auto p0 = radial(*sc.u), p1 = radial(*sc.v);
        const bool want_slices = sc.write_csv || (p0 && p1);
        if (!want_slices) return;
        EnvelopeOptions o = co.envelope;
        GridFunction a = psh_projection(u0, o), b = psh_projection(u1, o);
        GeodesicField V = largest_geodesic(a, b, sc.m, o);
        if (p0 && p1) {
            double worst = 0.0;
            for (int k = 1; k < V.m; ++k)
                worst = std::max(worst, radial_sup_gap(V.slice(k), radial_geodesic(*p0, *p1, V.t[static_cast<std::size_t>(k)])));
            rec.checks.push_back(below("radial geodesic", worst, 1e-3, "sup over interior slices of |V - Legendre geodesic|"));
        }
        if (sc.write_csv) {
            std::string f = stem("geodesic") + ".csv";
            std::ofstream os(dir / f);
            static const char* names[4] = {"x1", "y1", "x2", "y2"};
            os << "slice,t,";
            for (int d = 0; d < grid->dim(); ++d) os << names[d] << ',';
            os << "value\n" << std::setprecision(17);
            for (int k = 0; k <= V.m; ++k)
                for (std::size_t i = 0; i < grid->size(); ++i) {
                    os << k << ',' << V.t[static_cast<std::size_t>(k)] << ',';
                    for (int d = 0; d < grid->dim(); ++d) os << grid->point(i)[static_cast<std::size_t>(d)] << ',';
                    os << V.value(i, k) << '\n';
                }
            rec.files.push_back(f);
        }
    }

    void run_decompose() {
        GridFunction u = build(*sc.u, "functions.u");
        const double tol = sc.tolerances.comp > 0.0 ? sc.tolerances.comp : tol::comp(data_scale(u));
        SolverParams sp;
        sp.tol_res = sc.tolerances.res;
        Decomposition d = decompose(u, tol, sp);
        quantity("viol_r", d.viol_r);
        quantity("viol_s", d.viol_s);
        quantity("viol_sum", d.viol_sum);
        quantity("regular_match", d.regular_match);
        rec.checks.push_back(below("u <= u_r", d.viol_r, tol));
        rec.checks.push_back(below("u <= u_s", d.viol_s, tol));
        rec.checks.push_back(below("u_r + u_s <= u", d.viol_sum, tol));
        rec.checks.push_back(below("regular match", d.regular_match, tol_res(), "max cell |MA(u_r) - mu_r(u)|"));
        rec.checks.push_back(flag("atoms match", d.atoms_match, d.message));
        csv_grid("u_r", d.u_r);
        csv_grid("u_s", d.u_s);
        binary("u_r", d.u_r);
        binary("u_s", d.u_s);
    }

    void run_dirichlet() {
        MeasureField mu;
        if (sc.measure.kind == "random") {
            mu = random_measure(grid, sc.measure.problem);
        } else {
            GridFunction src = build(*sc.measure.source, "measure.function");
            MaOptions local;
            local.conservative = false;
            mu = regular_part(src, nullptr, local);
            mu.atoms = singular_part(src).atoms;
        }
        if (sc.measure.density_scale != 1.0) mu = scale_density(mu, sc.measure.density_scale);
        GridFunction H = sc.boundary ? build(*sc.boundary, "boundary") : GridFunction::constant(grid, 0.0);
        SolverParams sp;
        sp.tol_res = sc.tolerances.res;
        SolveReport rep;
        GridFunction sol = solve_dirichlet({mu, H, sp}, &rep);
        quantity("sweeps", rep.sweeps);
        quantity("residual", rep.residual);
        quantity("total_target", rep.total_target);
        quantity("total_mass", rep.total_mass);
        quantity("atoms", static_cast<double>(rep.poles.size()));
        rec.checks.push_back(below("mass residual", rep.residual, tol_res(), "max cell |MA(u) - mu|"));
        reference_check(sol, tol::comp(data_scale(sol)));
        csv_measure("measure", mu);
        csv_grid("solution", sol);
        binary("solution", sol);
    }

    void run_theorem() {
        SuiteConfig cfg;
        cfg.domain = sc.domain;
        cfg.resolution = grid->resolution();
        cfg.seed = sc.seed;
        cfg.count = sc.count;
        cfg.m = sc.m;
        cfg.envelope = eo;
        if (sc.tolerances.env > 0.0) cfg.envelope.tol = sc.tolerances.env;
        SuiteReport r = verify_theorem(sc.theorem, cfg);
        quantity("worst_ratio", r.worst_ratio());
        rec.checks = r.checks;
        if (sc.write_csv) {
            std::string f = stem("checks") + ".csv";
            std::ofstream os(dir / f);
            os << "name,pass,value,tol\n" << std::setprecision(17);
            for (const auto& c : r.checks) os << '"' << c.name << "\"," << (c.pass ? 1 : 0) << ',' << c.value << ',' << c.tol << '\n';
            rec.files.push_back(f);
        }
    }

    void run() {
        const std::string& e = sc.experiment;
        if (e == "ma") run_ma();
        else if (e == "envelope") run_envelope();
        else if (e == "rooftop") run_rooftop();
        else if (e == "residual") run_residual();
        else if (e == "geodesic") run_geodesic();
        else if (e == "decompose") run_decompose();
        else if (e == "dirichlet") run_dirichlet();
        else run_theorem();
    }
};

// JSON number, with non-finite values spelled out.
ojson num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

ojson check_json(const CheckResult& c) {
    ojson j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["value"] = num(c.value);
    j["tol"] = num(c.tol);
    if (!c.detail.empty()) j["detail"] = c.detail;
    return j;
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> v{"ma", "envelope", "rooftop", "residual", "geodesic", "decompose", "dirichlet",
                                            "verify-theorem"};
    return v;
}

Scenario parse_scenario(const std::string& text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        std::string msg = e.what();
        auto p = msg.find("column ");
        if (p != std::string::npos) p = msg.find(": ", p);
        throw SchemaError(line_col(text, e.byte), p == std::string::npos ? msg : msg.substr(p + 2));
    }
    check_keys(j, "", {"name", "description", "experiment", "theorem", "domain", "resolution", "resolutions", "functions",
                       "measure", "boundary", "geodesic", "seed", "count", "tolerances", "expect", "output"});
    Scenario sc;
    sc.name = get_string(j, "", "name", "", true);
    if (sc.name.empty() || !std::all_of(sc.name.begin(), sc.name.end(), [](char ch) {
            return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
        }))
        throw SchemaError("name", "must be non-empty and use only letters, digits, '_', '-', '.'");
    sc.experiment = get_string(j, "", "experiment", "", true);
    const auto& ex = experiment_names();
    if (std::find(ex.begin(), ex.end(), sc.experiment) == ex.end()) throw SchemaError("experiment", "unknown experiment '" + sc.experiment + "'");

    if (j.contains("domain")) {
        const json& d = j.at("domain");
        check_keys(d, "domain", {"kind", "n", "radius"});
        std::string kind = get_string(d, "domain", "kind", "ball");
        if (kind != "ball" && kind != "polydisc" && kind != "bidisc") throw SchemaError("domain.kind", "expected ball or polydisc");
        long long n = get_int(d, "domain", "n", 1);
        if (n != 1 && n != 2) throw SchemaError("domain.n", "only n = 1 and n = 2 are supported");
        double R = get_positive(d, "domain", "radius", 1.0);
        sc.domain = make_domain(domain_kind_from_string(kind.c_str()), static_cast<int>(n), R);
    }

    if (j.contains("resolution") && j.contains("resolutions")) throw SchemaError("resolutions", "give resolution or resolutions, not both");
    if (j.contains("resolution")) {
        sc.resolutions = {static_cast<int>(get_int(j, "", "resolution", 33))};
    } else if (j.contains("resolutions")) {
        const json& r = j.at("resolutions");
        if (!r.is_array() || r.empty()) throw SchemaError("resolutions", "expected a non-empty array of integers");
        sc.resolutions.clear();
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (!r[k].is_number_integer()) throw SchemaError("resolutions[" + std::to_string(k) + "]", "expected an integer");
            sc.resolutions.push_back(r[k].get<int>());
        }
    }
    for (std::size_t k = 0; k < sc.resolutions.size(); ++k) {
        int N = sc.resolutions[k];
        int hi = sc.domain.n == 1 ? 1025 : 41;
        if (N < 9 || N > hi)
            throw SchemaError(j.contains("resolution") ? "resolution" : "resolutions[" + std::to_string(k) + "]",
                              "must be between 9 and " + std::to_string(hi));
    }

    if (j.contains("functions")) {
        const json& f = j.at("functions");
        check_keys(f, "functions", {"u", "v"});
        if (f.contains("u")) sc.u = parse_function(f.at("u"), "functions.u", sc.domain, base_dir);
        if (f.contains("v")) sc.v = parse_function(f.at("v"), "functions.v", sc.domain, base_dir);
    }
    if (needs_u(sc.experiment) && !sc.u) throw SchemaError("functions.u", "required for experiment " + sc.experiment);
    if (needs_v(sc.experiment) && !sc.v) throw SchemaError("functions.v", "required for experiment " + sc.experiment);

    if (sc.experiment == "verify-theorem") {
        sc.theorem = get_string(j, "", "theorem", "", true);
        const auto& tags = theorem_tags();
        if (std::find(tags.begin(), tags.end(), sc.theorem) == tags.end())
            throw SchemaError("theorem", "unmapped theorem tag '" + sc.theorem + "'");
    } else if (j.contains("theorem")) {
        throw SchemaError("theorem", "only used by verify-theorem");
    }

    if (j.contains("measure")) {
        const json& m = j.at("measure");
        check_keys(m, "measure", {"kind", "seed", "modes", "density_mass", "min_atoms", "max_atoms", "function", "density_scale"});
        sc.measure.kind = get_string(m, "measure", "kind", "random");
        if (sc.measure.kind != "random" && sc.measure.kind != "ma_of") throw SchemaError("measure.kind", "expected random or ma_of");
        long long seed = get_int(m, "measure", "seed", 1);
        if (seed < 0) throw SchemaError("measure.seed", "must be >= 0");
        sc.measure.problem.seed = static_cast<std::uint64_t>(seed);
        sc.measure.problem.modes = static_cast<int>(get_int(m, "measure", "modes", 3));
        sc.measure.problem.density_mass = get_positive(m, "measure", "density_mass", 0.5);
        sc.measure.problem.min_atoms = static_cast<int>(get_int(m, "measure", "min_atoms", 0));
        sc.measure.problem.max_atoms = static_cast<int>(get_int(m, "measure", "max_atoms", 2));
        if (sc.measure.problem.min_atoms < 0 || sc.measure.problem.max_atoms < sc.measure.problem.min_atoms)
            throw SchemaError("measure.max_atoms", "need 0 <= min_atoms <= max_atoms");
        sc.measure.density_scale = get_positive(m, "measure", "density_scale", 1.0);
        if (m.contains("function")) sc.measure.source = parse_function(m.at("function"), "measure.function", sc.domain, base_dir);
        if (sc.measure.kind == "ma_of" && !sc.measure.source) throw SchemaError("measure.function", "required for kind ma_of");
    }
    if (j.contains("boundary")) sc.boundary = parse_function(j.at("boundary"), "boundary", sc.domain, base_dir);

    if (j.contains("geodesic")) {
        const json& g = j.at("geodesic");
        check_keys(g, "geodesic", {"m"});
        sc.m = static_cast<int>(get_int(g, "geodesic", "m", 16));
        if (sc.m < 2) throw SchemaError("geodesic.m", "must be >= 2");
    }
    long long seed = get_int(j, "", "seed", 7);
    if (seed < 0) throw SchemaError("seed", "must be >= 0");
    sc.seed = static_cast<std::uint64_t>(seed);
    sc.count = static_cast<int>(get_int(j, "", "count", 10));
    if (sc.count < 1) throw SchemaError("count", "must be >= 1");

    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        check_keys(t, "tolerances", {"env", "mass", "res", "comp", "gap_factor"});
        sc.tolerances.env = get_positive(t, "tolerances", "env", 0.0);
        sc.tolerances.mass = get_positive(t, "tolerances", "mass", 0.0);
        sc.tolerances.res = get_positive(t, "tolerances", "res", 0.0);
        sc.tolerances.comp = get_positive(t, "tolerances", "comp", 0.0);
        sc.tolerances.gap_factor = get_positive(t, "tolerances", "gap_factor", 10.0);
    }
    if (j.contains("expect")) {
        const json& e = j.at("expect");
        check_keys(e, "expect", {"total_mass", "mass_rel_tol", "connectable", "reference", "reference_tol", "radial_oracle", "closed_form"});
        sc.expect.closed_form = get_string(e, "expect", "closed_form", "");
        if (!sc.expect.closed_form.empty() && sc.expect.closed_form != "log_coordinate_ball")
            throw SchemaError("expect.closed_form", "unknown closed form '" + sc.expect.closed_form + "' (expected log_coordinate_ball)");
        if (e.contains("total_mass")) sc.expect.total_mass = get_number(e, "expect", "total_mass", 0.0);
        sc.expect.mass_rel_tol = get_positive(e, "expect", "mass_rel_tol", 0.05);
        if (e.contains("connectable")) sc.expect.connectable = get_bool(e, "expect", "connectable", false);
        if (e.contains("reference")) sc.expect.reference = parse_function(e.at("reference"), "expect.reference", sc.domain, base_dir);
        sc.expect.reference_tol = get_positive(e, "expect", "reference_tol", 0.0);
        sc.expect.radial_oracle = get_bool(e, "expect", "radial_oracle", false);
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, "output", {"csv", "grids"});
        sc.write_csv = get_bool(o, "output", "csv", true);
        sc.write_grids = get_bool(o, "output", "grids", true);
    }
    return sc;
}

Scenario load_scenario(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path.string(), "cannot open scenario file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.parent_path());
}

fs::path output_root() {
    const char* e = std::getenv("PLURI_OUT");
    return e && *e ? fs::path(e) : fs::path("pluri_out");
}

std::string report_json(const Scenario& sc, const ScenarioOutcome& out) {
    ojson j;
    j["scenario"] = sc.name;
    j["experiment"] = sc.experiment;
    if (!sc.theorem.empty()) {
        j["theorem"] = sc.theorem;
        j["invariant"] = theorem_invariant(sc.theorem);
    }
    j["domain"] = {{"kind", to_string(sc.domain.kind)}, {"n", sc.domain.n}, {"radius", sc.domain.radius}};
    j["seed"] = sc.seed;
    j["pass"] = out.pass;
    double worst = 0.0;
    ojson runs = ojson::array();
    for (const auto& r : out.runs) {
        ojson jr;
        jr["resolution"] = r.resolution;
        bool pass = true;
        ojson q = ojson::object();
        for (const auto& [k, v] : r.quantities) q[k] = num(v);
        jr["quantities"] = q;
        ojson cs = ojson::array();
        for (const auto& c : r.checks) {
            cs.push_back(check_json(c));
            pass = pass && c.pass;
            if (std::isfinite(c.tol) && c.tol > 0.0) worst = std::max(worst, c.value / c.tol);
        }
        jr["pass"] = pass;
        jr["checks"] = cs;
        jr["files"] = r.files;
        runs.push_back(jr);
    }
    j["worst_ratio"] = num(worst);
    if (!out.error.empty()) j["error"] = out.error;
    j["runs"] = runs;
    return j.dump(2) + "\n";
}

ScenarioOutcome run_scenario(const Scenario& sc, const fs::path& dir) {
    fs::create_directories(dir);
    ScenarioOutcome out;
    out.name = sc.name;
    out.directory = dir;
    out.pass = true;
    const std::string started = timestamp();
    for (int N : sc.resolutions) {
        auto t0 = std::chrono::steady_clock::now();
        Run run{sc, make_grid(sc.domain, N), EnvelopeOptions{}, dir, {}};
        run.rec.resolution = N;
        try {
            run.run();
        } catch (const SchemaError&) {
            throw;
        } catch (const Error& e) {
            std::string msg = sc.experiment + " at resolution " + std::to_string(N) + ": " + e.what();
            if (out.error.empty()) out.error = msg;
            run.rec.checks.push_back(flag("error", false, msg));
        }
        run.rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (run.rec.checks.empty()) run.rec.checks.push_back(flag("run", true, "no checks requested"));
        for (const auto& c : run.rec.checks) out.pass = out.pass && c.pass;
        out.runs.push_back(std::move(run.rec));
    }
    std::ofstream(dir / "report.json") << report_json(sc, out);
    ojson t;
    t["scenario"] = sc.name;
    t["started"] = started;
    double total = 0.0;
    ojson rs = ojson::array();
    for (const auto& r : out.runs) {
        rs.push_back({{"resolution", r.resolution}, {"seconds", r.seconds}});
        total += r.seconds;
    }
    t["runs"] = rs;
    t["total_seconds"] = total;
    std::ofstream(dir / "timings.json") << t.dump(2) << '\n';
    return out;
}

CalibrationReport calibrate(const fs::path& dir, const std::vector<int>& dims) {
    CalibrationReport rep;
    ojson j;
    j["test"] = "green-mass";
    j["function"] = "max(log|z|, -4) on the unit ball";
    ojson tables = ojson::array();
    for (int n : dims) {
        const std::vector<int> res = n == 1 ? std::vector<int>{65, 129, 257} : std::vector<int>{13, 17, 21};
        const double exact = std::pow(tol::two_pi, n);
        ojson rows = ojson::array();
        for (std::size_t k = 0; k < res.size(); ++k) {
            auto t0 = std::chrono::steady_clock::now();
            GridPtr g = make_grid(make_domain(DomainKind::ball, n), res[k]);
            FunctionSpec G;
            G.kind = "green";
            FunctionSpec f;
            f.kind = "truncate";
            f.level = 4.0;
            f.args = {G};
            CalibrationRow row;
            row.n = n;
            row.resolution = res[k];
            row.h = g->h();
            GridFunction u = build_function(f, g);
            if (n == 1) u = psh_projection(u);
            row.mass = ma_measure(u).total_mass();
            row.exact = exact;
            row.rel_error = std::abs(row.mass - exact) / exact;
            if (k > 0) {
                const CalibrationRow& prev = rep.rows.back();
                row.order = std::log(prev.rel_error / row.rel_error) / std::log(prev.h / row.h);
            }
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            rep.rows.push_back(row);
            rows.push_back({{"resolution", row.resolution},
                            {"h", row.h},
                            {"mass", row.mass},
                            {"exact", row.exact},
                            {"rel_error", row.rel_error},
                            {"observed_order", k > 0 ? num(row.order) : ojson(nullptr)}});
        }
        tables.push_back({{"n", n}, {"input", n == 1 ? "discrete psh projection" : "sampled"}, {"rows", rows}});
    }
    j["tables"] = tables;
    rep.json = j.dump(2) + "\n";
    if (!dir.empty()) {
        fs::create_directories(dir);
        std::ofstream(dir / "calibration.json") << rep.json;
        ojson t;
        t["started"] = timestamp();
        ojson rs = ojson::array();
        for (const auto& r : rep.rows) rs.push_back({{"n", r.n}, {"resolution", r.resolution}, {"seconds", r.seconds}});
        t["runs"] = rs;
        std::ofstream(dir / "timings.json") << t.dump(2) << '\n';
    }
    return rep;
}

}  // namespace pluri
