#include "pluri/catalogue.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "offsets.hpp"
#include "pluri/error.hpp"
#include "pluri/psh.hpp"

namespace pluri {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void need_args(const std::vector<FunctionSpec>& a, std::size_t lo, std::size_t hi, const std::string& path) {
    if (a.size() < lo || a.size() > hi)
        throw SchemaError(path + ".args", "expected " + std::to_string(lo) + (hi == lo ? "" : " or more") + " arguments, got " +
                                              std::to_string(a.size()));
}

bool is_origin(const Point& p) {
    return std::all_of(p.begin(), p.end(), [](double x) { return x == 0.0; });
}

RadialProfile map_profile(const RadialProfile& p, double mul, double add) {
    RadialProfile r = p;
    for (double& v : r.phi) v = mul * v + add;
    r.nu = p.nu * mul;
    return r;
}

RadialProfile combine(const std::vector<RadialProfile>& ps, bool take_max) {
    RadialProfile r = ps.front();
    for (std::size_t j = 1; j < ps.size(); ++j)
        for (std::size_t k = 0; k < r.phi.size(); ++k)
            r.phi[k] = take_max ? std::max(r.phi[k], ps[j].phi[k]) : r.phi[k] + ps[j].phi[k];
    r.nu = ps.front().nu;
    for (std::size_t j = 1; j < ps.size(); ++j) r.nu = take_max ? std::min(r.nu, ps[j].nu) : r.nu + ps[j].nu;
    return r;
}

}  // namespace

const std::vector<std::string>& function_kinds() {
    static const std::vector<std::string> k{"const", "quadratic", "green", "log_coordinate", "radial", "max",
                                            "sum",   "scale",     "shift", "truncate",       "project"};
    return k;
}

const std::vector<std::string>& profile_kinds() {
    static const std::vector<std::string> k{"log", "const", "exp", "max", "sum", "csv"};
    return k;
}

RadialProfile build_profile(const ProfileSpec& spec, const std::string& path) {
    const std::string& k = spec.kind;
    if (k == "log") {
        if (spec.c < 0.0) throw SchemaError(path + ".c", "coefficient must be >= 0");
        double c = spec.c;
        return make_profile([c](double s) { return c * s; });
    }
    if (k == "const") {
        double v = spec.value;
        return make_profile([v](double) { return v; });
    }
    if (k == "exp") {
        if (spec.k <= 0.0 || spec.a < 0.0) throw SchemaError(path, "exp profile needs k > 0 and a >= 0");
        double a = spec.a, kk = spec.k;
        return make_profile([a, kk](double s) { return a * (std::exp(kk * s) - 1.0); });
    }
    if (k == "max" || k == "sum") {
        if (spec.args.empty()) throw SchemaError(path + ".args", "needs at least one profile");
        std::vector<RadialProfile> ps;
        for (std::size_t j = 0; j < spec.args.size(); ++j)
            ps.push_back(build_profile(spec.args[j], path + ".args[" + std::to_string(j) + "]"));
        return combine(ps, k == "max");
    }
    if (k == "csv") {
        std::ifstream in(spec.path);
        if (!in) throw SchemaError(path + ".path", "cannot open '" + spec.path + "'");
        try {
            return read_profile_csv(in);
        } catch (const InvalidArgument& e) {
            throw SchemaError(path + ".path", e.what());
        }
    }
    throw SchemaError(path + ".kind", "unknown profile kind '" + k + "'");
}

GridFunction max_of(const std::vector<GridFunction>& terms) {
    if (terms.empty()) throw InvalidArgument("max_of needs at least one term");
    for (const auto& t : terms) require_same_grid(terms.front(), t);
    std::vector<PoleSpec> poles = terms.front().poles();
    for (std::size_t j = 1; j < terms.size(); ++j) poles = merge_min(poles, terms[j].poles());
    const GridPtr& gp = terms.front().grid_ptr();
    const Grid& g = *gp;
    const auto& cross = g.stencil().crossings;
    std::vector<double> bg(g.size(), kNegInf), bd(cross.size(), kNegInf);
    for (const auto& t : terms) {
        auto off = detail::offset_terms(t.poles(), poles);
        for (std::size_t i = 0; i < bg.size(); ++i) {
            double o = off.empty() ? 0.0 : detail::offset_at_node(g, off, i);
            bg[i] = std::max(bg[i], t.background()[i] + o);
        }
        for (std::size_t c = 0; c < bd.size(); ++c) {
            double o = off.empty() ? 0.0 : detail::offset_at_point(g.domain(), off, cross[c].point);
            bd[c] = std::max(bd[c], t.boundary_background()[c] + o);
        }
    }
    auto skel = make_skeleton(gp, poles);
    for (std::size_t i = 0; i < bg.size(); ++i) {
        if (std::isfinite(bg[i])) continue;
        if (!skel->carrier()[i]) throw DomainError("max of functions is -inf off the common pole set at node " + std::to_string(i));
        bg[i] = 0.0;
    }
    for (double& v : bd)
        if (!std::isfinite(v)) v = 0.0;
    return GridFunction(gp, std::move(bg), std::move(bd), skel);
}

GridFunction sum_of(const std::vector<GridFunction>& terms) {
    if (terms.empty()) throw InvalidArgument("sum_of needs at least one term");
    std::vector<PoleSpec> poles;
    std::vector<double> bg(terms.front().size(), 0.0), bd(terms.front().boundary_background().size(), 0.0);
    for (const auto& t : terms) {
        require_same_grid(terms.front(), t);
        poles = merge_sum(poles, t.poles());
        for (std::size_t i = 0; i < bg.size(); ++i) bg[i] += t.background()[i];
        for (std::size_t c = 0; c < bd.size(); ++c) bd[c] += t.boundary_background()[c];
    }
    return GridFunction(terms.front().grid_ptr(), std::move(bg), std::move(bd), std::move(poles));
}

GridFunction scaled(const GridFunction& u, double factor) {
    if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
    std::vector<double> bg = u.background(), bd = u.boundary_background();
    for (double& v : bg) v *= factor;
    for (double& v : bd) v *= factor;
    return GridFunction(u.grid_ptr(), std::move(bg), std::move(bd), scale_poles(u.poles(), factor));
}

GridFunction shifted(const GridFunction& u, double c) {
    std::vector<double> bg = u.background(), bd = u.boundary_background();
    for (double& v : bg) v += c;
    for (double& v : bd) v += c;
    return u.with_background(std::move(bg), std::move(bd));
}

GridFunction build_function(const FunctionSpec& spec, GridPtr grid, const std::string& path, const EnvelopeOptions& opt) {
    const std::string& k = spec.kind;
    const Grid& g = *grid;
    const Domain& d = g.domain();
    auto arg = [&](std::size_t j) {
        return build_function(spec.args[j], grid, path + ".args[" + std::to_string(j) + "]", opt);
    };
    if (k == "const") return GridFunction::constant(grid, spec.value);
    if (k == "quadratic") {
        const double m = (d.kind == DomainKind::ball || d.n == 1) ? 1.0 : d.n;
        const double R2 = d.radius * d.radius;
        auto f = [&](const Point& x) {
            double s = 0.0;
            for (int a = 0; a < g.dim(); ++a) s += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
            return s / R2 - m;
        };
        std::vector<double> bg(g.size()), bd(g.stencil().crossings.size());
        for (std::size_t i = 0; i < bg.size(); ++i) bg[i] = f(g.point(i));
        for (std::size_t c = 0; c < bd.size(); ++c) bd[c] = f(g.stencil().crossings[c].point);
        return GridFunction(grid, std::move(bg), std::move(bd));
    }
    if (k == "green" || k == "log_coordinate") {
        if (!(spec.c > 0.0)) throw SchemaError(path + ".c", "pole coefficient must be positive");
        PoleSpec p;
        if (k == "green") {
            if (!d.contains(spec.at)) throw SchemaError(path + ".at", "pole must lie inside the domain");
            p = make_green_pole(g, spec.at, spec.c);
        } else {
            if (spec.axis < 0 || spec.axis >= d.n) throw SchemaError(path + ".axis", "axis out of range");
            p = make_hyperplane_pole(g, spec.axis, {spec.a_re, spec.a_im}, spec.c);
        }
        std::vector<double> bg(g.size(), 0.0), bd(g.stencil().crossings.size(), 0.0);
        return GridFunction(grid, std::move(bg), std::move(bd), std::vector<PoleSpec>{p});
    }
    if (k == "radial") {
        if (d.kind != DomainKind::ball && d.n != 1) throw SchemaError(path, "radial functions need a ball domain");
        return radial_to_grid(build_profile(spec.profile, path + ".profile"), grid);
    }
    if (k == "max" || k == "sum") {
        need_args(spec.args, 1, static_cast<std::size_t>(-1), path);
        std::vector<GridFunction> ts;
        for (std::size_t j = 0; j < spec.args.size(); ++j) ts.push_back(arg(j));
        return k == "max" ? max_of(ts) : sum_of(ts);
    }
    if (k == "scale") {
        need_args(spec.args, 1, 1, path);
        if (!(spec.factor > 0.0)) throw SchemaError(path + ".factor", "must be positive");
        return scaled(arg(0), spec.factor);
    }
    if (k == "shift") {
        need_args(spec.args, 1, 1, path);
        return shifted(arg(0), spec.value);
    }
    if (k == "truncate") {
        need_args(spec.args, 1, 1, path);
        if (!(spec.level > 0.0)) throw SchemaError(path + ".level", "must be positive");
        return truncate(arg(0), spec.level);
    }
    if (k == "project") {
        need_args(spec.args, 1, 1, path);
        return psh_projection(arg(0), opt);
    }
    throw SchemaError(path + ".kind", "unknown function kind '" + k + "'");
}

bool radial_profile_of(const FunctionSpec& spec, const Domain& d, RadialProfile* out) {
    const bool ball = d.kind == DomainKind::ball || d.n == 1;
    if (!ball) return false;
    const std::string& k = spec.kind;
    RadialProfile r;
    if (k == "const") {
        double v = spec.value;
        r = make_profile([v](double) { return v; });
    } else if (k == "quadratic") {
        r = make_profile([](double s) { return std::exp(2.0 * s) - 1.0; });
    } else if (k == "green") {
        if (!is_origin(spec.at)) return false;
        double c = spec.c;
        r = make_profile([c](double s) { return c * s; });
    } else if (k == "radial") {
        r = build_profile(spec.profile);
    } else if (k == "max" || k == "sum") {
        std::vector<RadialProfile> ps(spec.args.size());
        if (ps.empty()) return false;
        for (std::size_t j = 0; j < ps.size(); ++j)
            if (!radial_profile_of(spec.args[j], d, &ps[j])) return false;
        r = combine(ps, k == "max");
    } else if (k == "scale" || k == "shift" || k == "truncate" || k == "project") {
        if (spec.args.size() != 1) return false;
        RadialProfile a;
        if (!radial_profile_of(spec.args[0], d, &a)) return false;
        if (k == "scale") r = map_profile(a, spec.factor, 0.0);
        else if (k == "shift") r = map_profile(a, 1.0, spec.value);
        else if (k == "project") r = radial_envelope(a);
        else {
            r = a;
            for (double& v : r.phi) v = std::max(v, -spec.level);
            r.nu = 0.0;
        }
    } else {
        return false;
    }
    if (out) *out = std::move(r);
    return true;
}

std::string describe(const FunctionSpec& spec) {
    std::ostringstream os;
    const std::string& k = spec.kind;
    if (k == "const") os << spec.value;
    else if (k == "quadratic") os << "|z|^2-1";
    else if (k == "green") os << spec.c << "*G(" << spec.at[0] << "," << spec.at[1] << "," << spec.at[2] << "," << spec.at[3] << ")";
    else if (k == "log_coordinate") os << spec.c << "*log|z" << spec.axis + 1 << "-(" << spec.a_re << "+" << spec.a_im << "i)|";
    else if (k == "radial") os << "radial(" << spec.profile.kind << ")";
    else {
        os << k << "(";
        if (k == "scale") os << spec.factor << ",";
        if (k == "shift") os << spec.value << ",";
        if (k == "truncate") os << spec.level << ",";
        for (std::size_t j = 0; j < spec.args.size(); ++j) os << (j ? "," : "") << describe(spec.args[j]);
        os << ")";
    }
    return os.str();
}

}  // namespace pluri
