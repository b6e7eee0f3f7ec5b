#include "pluri/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pluri/cone.hpp"
#include "pluri/error.hpp"
#include "pluri/psh.hpp"
#include "pluri/tolerances.hpp"
#include "offsets.hpp"

namespace pluri {

namespace {

using detail::offset_at_node;
using detail::offset_at_point;
using detail::offset_terms;
constexpr double kInf = std::numeric_limits<double>::infinity();

double auto_omega(const Grid& g) {
    const double N = g.resolution() - 1;
    double w = 2.0 / (1.0 + std::sin(std::numbers::pi / N));
    if (g.n() == 2) w = 1.0 + 0.8 * (w - 1.0);
    return w;
}

bool same_pole_list(const std::vector<PoleSpec>& a, const std::vector<PoleSpec>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!a[i].same_carrier(b[i]) || a[i].c != b[i].c) return false;
    return true;
}

}  // namespace

Obstacle Obstacle::unconstrained(GridPtr grid) {
    Obstacle h;
    h.values.assign(grid->size(), kInf);
    h.boundary.assign(grid->stencil().crossings.size(), 0.0);
    h.grid = std::move(grid);
    return h;
}

Obstacle Obstacle::min_of(const std::vector<std::pair<const GridFunction*, double>>& terms) {
    if (terms.empty()) throw InvalidArgument("obstacle needs at least one term");
    Obstacle h;
    h.grid = terms.front().first->grid_ptr();
    for (const auto& t : terms) {
        require_same_grid(*terms.front().first, *t.first);
        h.poles = merge_max(h.poles, t.first->poles());
    }
    const Grid& g = *h.grid;
    const Domain& dom = g.domain();
    const auto& cross = g.stencil().crossings;
    h.values.assign(g.size(), kInf);
    h.boundary.assign(cross.size(), kInf);
    for (const auto& [u, shift] : terms) {
        auto off = offset_terms(u->poles(), h.poles);
        for (std::size_t i = 0; i < g.size(); ++i) {
            double o = off.empty() ? 0.0 : offset_at_node(g, off, i);
            h.values[i] = std::min(h.values[i], u->background()[i] + shift + o);
        }
        for (std::size_t c = 0; c < cross.size(); ++c) {
            double o = off.empty() ? 0.0 : offset_at_point(dom, off, cross[c].point);
            h.boundary[c] = std::min(h.boundary[c], u->boundary_background()[c] + shift + o);
        }
    }
    return h;
}

Obstacle& Obstacle::with_boundary(const GridFunction& b) {
    const Grid& g = *grid;
    const auto& cross = g.stencil().crossings;
    auto off = offset_terms(b.poles(), poles);
    for (std::size_t c = 0; c < cross.size(); ++c) {
        double o = off.empty() ? 0.0 : offset_at_point(g.domain(), off, cross[c].point);
        boundary[c] = b.boundary_background()[c] + o;
    }
    return *this;
}

Obstacle& Obstacle::restrict_to(const std::vector<char>& mask) {
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!mask[i]) values[i] = kInf;
    return *this;
}

double Obstacle::data_scale() const {
    double s = 0.0;
    for (double v : values)
        if (std::isfinite(v)) s = std::max(s, std::abs(v));
    for (double v : boundary)
        if (std::isfinite(v)) s = std::max(s, std::abs(v));
    return s;
}

GridFunction envelope(const Obstacle& h, const EnvelopeOptions& opt, EnvelopeStats* stats) {
    const Grid& g = *h.grid;
    const std::size_t M = g.size();
    auto skel = make_skeleton(h.grid, h.poles);
    const auto& S = skel->node_values();
    const auto& Sb = skel->crossing_values();

    std::vector<double> cap(M), bd(h.boundary.size());
    for (std::size_t i = 0; i < M; ++i) cap[i] = std::min(h.values[i], -S[i]);
    for (std::size_t c = 0; c < bd.size(); ++c) bd[c] = std::min(h.boundary[c], -Sb[c]);
    LineSystem sys = build_line_system(g, *skel, bd);

    const double tol = opt.tol > 0.0 ? opt.tol : tol::env(h.data_scale());
    const double stop = opt.stop_factor * tol;
    const double omega = opt.omega > 0.0 ? opt.omega : auto_omega(g);

    std::vector<double> w(M);
    bool warm = opt.warm_start && same_pole_list(opt.warm_start->poles(), skel->poles());
    for (std::size_t i = 0; i < M; ++i) {
        double start = warm ? std::min(opt.warm_start->background()[i], cap[i]) : cap[i];
        w[i] = std::isfinite(start) ? start : 0.0;
    }

    int sweeps = 0;
    double change = kInf;
    while (change >= stop) {
        if (sweeps >= opt.max_sweeps)
            throw ConvergenceError("envelope: no convergence after " + std::to_string(sweeps) + " sweeps");
        change = 0.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t n = 0; n < M; ++n) {
                std::size_t i = pass == 0 ? n : M - 1 - n;
                double target = std::min(sys.bound(w, i), cap[i]);
                if (!std::isfinite(target)) continue;
                double nw = w[i] + omega * (target - w[i]);
                if (nw > cap[i]) nw = cap[i];
                change = std::max(change, std::abs(nw - w[i]));
                w[i] = nw;
            }
        }
        sweeps += 2;
    }
    if (stats) {
        stats->sweeps = sweeps;
        stats->last_change = change;
        stats->tol = tol;
    }
    for (std::size_t c = 0; c < bd.size(); ++c)
        if (!std::isfinite(bd[c])) bd[c] = 0.0;
    return GridFunction(h.grid, std::move(w), std::move(bd), skel);
}

GridFunction envelope(Obstacle h, const GridFunction& boundary, const EnvelopeOptions& opt, EnvelopeStats* stats) {
    h.with_boundary(boundary);
    return envelope(h, opt, stats);
}

GridFunction psh_projection(const GridFunction& u, const EnvelopeOptions& opt) {
    EnvelopeOptions o = opt;
    if (o.tol <= 0.0) o.tol = tol::env(data_scale(u));
    return envelope(Obstacle::from(u), o);
}

GridFunction rooftop(const GridFunction& u, const GridFunction& v, const EnvelopeOptions& opt) {
    EnvelopeOptions o = opt;
    if (o.tol <= 0.0) o.tol = tol::env(data_scale(u, v));
    return envelope(Obstacle::min_of({{&u, 0.0}, {&v, 0.0}}), o);
}

GridFunction asymptotic_rooftop(const GridFunction& u, const GridFunction& v, const EnvelopeOptions& opt,
                                AsymptoticReport* report) {
    require_same_grid(u, v);
    EnvelopeOptions o = opt;
    if (o.tol <= 0.0) o.tol = tol::env(data_scale(u, v));
    AsymptoticReport rep;
    rep.tol = o.tol;
    GridFunction prev;
    for (int e = 0; e <= 10; ++e) {
        double C = std::ldexp(1.0, e);
        if (prev.valid()) o.warm_start = &prev;
        GridFunction cur = envelope(Obstacle::min_of({{&u, C}, {&v, 0.0}}), o);
        rep.C.push_back(C);
        if (prev.valid()) {
            double ch = 0.0, dec = 0.0;
            for (std::size_t i = 0; i < cur.size(); ++i) {
                double d = cur.background()[i] - prev.background()[i];
                ch = std::max(ch, std::abs(d));
                dec = std::max(dec, -d);
            }
            rep.change.push_back(ch);
            rep.worst_decrease = std::max(rep.worst_decrease, dec);
            if (ch < o.tol) {
                rep.stabilized = true;
                if (report) *report = rep;
                return cur;
            }
        }
        prev = std::move(cur);
    }
    if (report) *report = rep;
    throw ConvergenceError("asymptotic rooftop not stabilized at C = 2^10");
}

GridFunction residual(const GridFunction& u, const EnvelopeOptions& opt, AsymptoticReport* report) {
    GridFunction zero = GridFunction::constant(u.grid_ptr(), 0.0);
    EnvelopeOptions o = opt;
    if (o.tol <= 0.0) o.tol = tol::env(data_scale(u));
    return asymptotic_rooftop(u, zero, o, report);
}

namespace {

// Poles of u that survive balayage at level j: hyperplanes always reach the
// boundary; point poles only when their node lies off the closed subdomain.
std::vector<PoleSpec> surviving_poles(const GridFunction& u, const std::vector<char>& inside) {
    std::vector<PoleSpec> keep;
    for (const auto& p : u.poles())
        if (p.model == PoleModel::hyperplane || !inside[static_cast<std::size_t>(p.node)]) keep.push_back(p);
    return keep;
}

GridFunction balayage_masked(const GridFunction& u, const std::vector<char>& inside, const EnvelopeOptions& opt) {
    Obstacle h = Obstacle::from(u);
    // Re-express the obstacle relative to the surviving skeleton.
    std::vector<PoleSpec> keep = surviving_poles(u, inside);
    if (keep.size() != u.poles().size()) {
        const Grid& g = u.grid();
        auto off = offset_terms(u.poles(), keep);
        for (std::size_t i = 0; i < g.size(); ++i)
            h.values[i] = u.background()[i] + offset_at_node(g, off, i);
        const auto& cross = g.stencil().crossings;
        for (std::size_t c = 0; c < cross.size(); ++c)
            h.boundary[c] = u.boundary_background()[c] + offset_at_point(g.domain(), off, cross[c].point);
        h.poles = keep;
    }
    for (std::size_t i = 0; i < inside.size(); ++i)
        if (inside[i]) h.values[i] = kInf;
    EnvelopeOptions o = opt;
    if (o.tol <= 0.0) o.tol = tol::env(data_scale(u));
    return envelope(h, o);
}

}  // namespace

GridFunction balayage(const GridFunction& u, int j, const EnvelopeOptions& opt) {
    return balayage_masked(u, u.grid().exhaustion_mask(j), opt);
}

GridFunction smallest_maximal_majorant(const GridFunction& u, const EnvelopeOptions& opt, MajorantReport* report) {
    MajorantReport rep;
    GridFunction prev;
    EnvelopeOptions o = opt;
    if (o.tol <= 0.0) o.tol = tol::env(data_scale(u));
    for (int j = 1; j <= 12; ++j) {
        auto inside = u.grid().exhaustion_mask(j);
        if (prev.valid()) o.warm_start = &prev;
        GridFunction cur = balayage_masked(u, inside, o);
        rep.levels.push_back(j);
        if (prev.valid()) rep.change.push_back(sup_distance(cur, prev));
        bool exhausted = std::all_of(inside.begin(), inside.end(), [](char c) { return c != 0; });
        prev = std::move(cur);
        if (exhausted) {
            rep.final_level = j;
            if (report) *report = rep;
            return prev;
        }
    }
    if (report) *report = rep;
    throw ConvergenceError("smallest maximal majorant not stabilized past j = 12");
}

const char* to_string(CegrellClass c) {
    switch (c) {
        case CegrellClass::E0: return "E0";
        case CegrellClass::F: return "F";
        case CegrellClass::N: return "N";
        case CegrellClass::NH: return "N(H)";
    }
    return "?";
}

double data_scale(const GridFunction& u) { return u.scale(); }
double data_scale(const GridFunction& u, const GridFunction& v) { return std::max(u.scale(), v.scale()); }

namespace {

double sup_abs(const GridFunction& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s = std::max(s, std::abs(u.value(i)));
    return s;
}

ClassVerdict in_N(const GridFunction& u, const EnvelopeOptions& opt) {
    ClassVerdict v;
    const double tc = tol::class_tol(data_scale(u));
    GridFunction ut = smallest_maximal_majorant(u, opt);
    v.measure = sup_abs(ut);
    v.verdict = v.measure < tc;
    if (!v.verdict) v.reason = "sup|u~| = " + std::to_string(v.measure) + " >= tol_class";
    v.witness = std::move(ut);
    return v;
}

}  // namespace

ClassVerdict class_membership(const GridFunction& u, CegrellClass cls, const GridFunction* H,
                              const EnvelopeOptions& opt) {
    const double tc = tol::class_tol(data_scale(u));
    ClassVerdict v;
    switch (cls) {
        case CegrellClass::E0: {
            if (!u.bounded()) {
                v.reason = "unbounded (has poles)";
                return v;
            }
            double b = 0.0;
            for (std::size_t c = 0; c < u.boundary_background().size(); ++c)
                b = std::max(b, std::abs(u.boundary_value(c)));
            v.measure = b;
            if (b >= tc) {
                v.reason = "boundary values " + std::to_string(b) + " != 0";
                return v;
            }
            double mass = ma_measure(u).total_mass();
            v.verdict = std::isfinite(mass);
            if (!v.verdict) v.reason = "infinite Monge-Ampere mass";
            return v;
        }
        case CegrellClass::N: return in_N(u, opt);
        case CegrellClass::F: {
            for (const auto& p : u.poles())
                if (p.model == PoleModel::hyperplane) {
                    v.reason = "hyperplane pole: infinite Monge-Ampere mass";
                    return v;
                }
            v = in_N(u, opt);
            if (!v.verdict) return v;
            double mass = ma_measure(u).total_mass();
            if (!std::isfinite(mass)) {
                v.verdict = false;
                v.reason = "infinite Monge-Ampere mass";
            }
            return v;
        }
        case CegrellClass::NH: {
            if (!H) throw InvalidArgument("class N(H) needs H");
            require_same_grid(u, *H);
            double upper = sup_excess(u, *H);
            EnvelopeOptions o = opt;
            if (o.tol <= 0.0) o.tol = tol::env(data_scale(u, *H));
            // phi = P(min(u - H, 0)); H is pole-free in every use here.
            GridFunction negH = H->with_background([&] {
                std::vector<double> b(H->size());
                for (std::size_t i = 0; i < b.size(); ++i) b[i] = -H->background()[i];
                return b;
            }(), [&] {
                std::vector<double> b(H->boundary_background().size());
                for (std::size_t c = 0; c < b.size(); ++c) b[c] = -H->boundary_background()[c];
                return b;
            }());
            if (!H->bounded()) throw InvalidArgument("class N(H): H must be pole-free");
            Obstacle h = Obstacle::from(u);
            for (std::size_t i = 0; i < h.values.size(); ++i) h.values[i] += negH.background()[i];
            for (std::size_t c = 0; c < h.boundary.size(); ++c) h.boundary[c] += negH.boundary_background()[c];
            GridFunction phi = envelope(h, o);
            ClassVerdict n = in_N(phi, opt);
            double lower = 0.0;  // max (phi + H - u)
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (u.is_carrier(i)) continue;
                lower = std::max(lower, phi.value(i) + H->value(i) - u.value(i));
            }
            v.measure = std::max({upper, lower, n.measure});
            v.verdict = n.verdict && upper < tc && lower < tc;
            if (!n.verdict) v.reason = "witness not in N: " + n.reason;
            else if (upper >= tc) v.reason = "u <= H fails by " + std::to_string(upper);
            else if (lower >= tc) v.reason = "u >= phi + H fails by " + std::to_string(lower);
            v.witness = std::move(phi);
            return v;
        }
    }
    return v;
}

}  // namespace pluri
