#include "pluri/radial.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pluri/error.hpp"

namespace pluri {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double read_nu(const std::vector<double>& phi, double ds) {
    const int m = std::min<int>(RadialProfile::kSlopeSamples, static_cast<int>(phi.size())) - 1;
    auto slope = [&](int w) {
        auto a = static_cast<std::size_t>(w * m), b = static_cast<std::size_t>((w + 1) * m);
        return (phi[b] - phi[a]) / (m * ds);
    };
    double nu = slope(0);
    // Bounded smooth terms add slopes ~ A e^{k s}: remove them by geometric
    // extrapolation over three consecutive windows.
    if (static_cast<int>(phi.size()) > 3 * m) {
        double d1 = nu, d2 = slope(1), d3 = slope(2);
        double q = (d3 - d2) / (d2 - d1);
        if (d2 > d1 && d3 > d2 && q > 1.0 + 1e-9) nu = d1 - (d2 - d1) / (q - 1.0);
    }
    nu = std::round(nu * 1e6) / 1e6;
    return std::max(nu, 0.0);
}

RadialProfile like(const RadialProfile& p, std::vector<double> phi, double nu) {
    RadialProfile r;
    r.s_min = p.s_min;
    r.ds = p.ds;
    r.phi = std::move(phi);
    r.nu = nu;
    return r;
}

void require_same_grid(const RadialProfile& a, const RadialProfile& b) {
    if (a.size() != b.size() || a.s_min != b.s_min || a.ds != b.ds)
        throw InvalidArgument("radial profiles are sampled on different s-grids");
}

double cross(double ax, double ay, double bx, double by, double cx, double cy) {
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

}  // namespace

double RadialProfile::value(double s) const {
    if (s < s_min) return nu == 0.0 ? phi.front() : phi.front() + nu * (s - s_min);
    double x = (s - s_min) / ds;
    int k = std::min(static_cast<int>(x), size() - 2);
    double f = x - k;
    return (1.0 - f) * phi[static_cast<std::size_t>(k)] + f * phi[static_cast<std::size_t>(k + 1)];
}

double RadialProfile::left_slope(double s) const {
    if (s <= s_min) return nu;
    int k = static_cast<int>(std::ceil((s - s_min) / ds - 1e-9)) - 1;
    k = std::clamp(k, 0, size() - 2);
    return (phi[static_cast<std::size_t>(k + 1)] - phi[static_cast<std::size_t>(k)]) / ds;
}

RadialProfile make_profile(const std::function<double(double)>& f) {
    RadialProfile p;
    p.phi.resize(RadialProfile::kSamples);
    for (int k = 0; k < RadialProfile::kSamples; ++k) p.phi[static_cast<std::size_t>(k)] = f(p.s(k));
    p.phi.back() = f(0.0);
    p.nu = read_nu(p.phi, p.ds);
    return p;
}

RadialProfile profile_from_samples(std::vector<double> phi) {
    if (phi.size() != static_cast<std::size_t>(RadialProfile::kSamples))
        throw InvalidArgument("radial profile needs " + std::to_string(RadialProfile::kSamples) + " samples");
    RadialProfile p;
    p.phi = std::move(phi);
    p.nu = read_nu(p.phi, p.ds);
    return p;
}

ProfileCheck check_profile(const RadialProfile& p, double tol) {
    ProfileCheck c;
    const int N = p.size();
    for (int k = 0; k + 1 < N; ++k)
        c.worst_monotonicity = std::min(c.worst_monotonicity, p.phi[static_cast<std::size_t>(k + 1)] - p.phi[static_cast<std::size_t>(k)]);
    for (int k = 1; k + 1 < N; ++k)
        c.worst_convexity = std::min(c.worst_convexity, p.phi[static_cast<std::size_t>(k + 1)] + p.phi[static_cast<std::size_t>(k - 1)] -
                                                            2.0 * p.phi[static_cast<std::size_t>(k)]);
    c.slope_gap = std::abs((p.phi[1] - p.phi[0]) / p.ds - p.nu);
    c.verdict = c.worst_monotonicity >= -tol && c.worst_convexity >= -tol && c.slope_gap <= std::max(tol, 1e-6);
    return c;
}

GridFunction radial_to_grid(const RadialProfile& p, GridPtr grid) {
    const Domain& d = grid->domain();
    if (d.kind != DomainKind::ball && d.n != 1) throw InvalidArgument("radial_to_grid needs a ball domain");
    std::vector<PoleSpec> poles;
    if (p.nu > 0.0) poles.push_back(make_green_pole(*grid, Point{}, p.nu));
    auto skel = make_skeleton(grid, poles);
    const std::size_t M = grid->size();
    std::vector<double> bg(M, 0.0);
    for (std::size_t i = 0; i < M; ++i) {
        if (skel->carrier()[i]) continue;
        double s = std::log(d.gauge(grid->point(i)));
        bg[i] = p.value(s) - skel->node_values()[i];
    }
    std::vector<double> bd(grid->stencil().crossings.size());
    for (std::size_t c = 0; c < bd.size(); ++c) {
        double s = std::min(0.0, std::log(d.gauge(grid->stencil().crossings[c].point)));
        bd[c] = p.value(s) - skel->crossing_values()[c];
    }
    return GridFunction(grid, std::move(bg), std::move(bd), skel);
}

double radial_ma_mass(const RadialProfile& p, double r, int n) {
    if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("radial_ma_mass needs 0 < r <= 1");
    return std::pow(2.0 * std::numbers::pi * p.left_slope(std::log(r)), n);
}

double radial_atom_mass(const RadialProfile& p, int n) { return std::pow(2.0 * std::numbers::pi * p.nu, n); }

RadialProfile radial_envelope(const RadialProfile& o) {
    const int N = o.size();
    // Work with g = o - nu s, which is bounded on the left; its largest convex
    // nondecreasing minorant is flat left of the minimum and the lower hull to
    // the right of it.
    std::vector<double> g(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) g[static_cast<std::size_t>(k)] = o.phi[static_cast<std::size_t>(k)] - o.nu * o.s(k);
    int kmin = 0;
    for (int k = 1; k < N; ++k)
        if (g[static_cast<std::size_t>(k)] <= g[static_cast<std::size_t>(kmin)]) kmin = k;
    std::vector<int> hull;
    for (int k = kmin; k < N; ++k) {
        while (hull.size() >= 2) {
            int a = hull[hull.size() - 2], b = hull.back();
            if (cross(o.s(a), g[static_cast<std::size_t>(a)], o.s(b), g[static_cast<std::size_t>(b)], o.s(k),
                      g[static_cast<std::size_t>(k)]) <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(k);
    }
    std::vector<double> out(static_cast<std::size_t>(N));
    for (int k = 0; k <= kmin; ++k) out[static_cast<std::size_t>(k)] = g[static_cast<std::size_t>(kmin)];
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
        const int a = hull[h], b = hull[h + 1];
        const double ga = g[static_cast<std::size_t>(a)], gb = g[static_cast<std::size_t>(b)];
        out[static_cast<std::size_t>(a)] = ga;
        for (int k = a + 1; k < b; ++k) {
            double f = static_cast<double>(k - a) / (b - a);
            out[static_cast<std::size_t>(k)] = std::min(g[static_cast<std::size_t>(k)], (1.0 - f) * ga + f * gb);
        }
    }
    out.back() = g.back();
    for (int k = 0; k < N; ++k) out[static_cast<std::size_t>(k)] += o.nu * o.s(k);
    return like(o, std::move(out), o.nu);
}

RadialProfile radial_min(const RadialProfile& a, const RadialProfile& b) {
    require_same_grid(a, b);
    std::vector<double> m(a.phi.size());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = std::min(a.phi[k], b.phi[k]);
    return like(a, std::move(m), std::max(a.nu, b.nu));
}

RadialProfile radial_rooftop(const RadialProfile& a, const RadialProfile& b) { return radial_envelope(radial_min(a, b)); }

RadialProfile radial_residual(const RadialProfile& p, double tol, RadialResidualReport* report) {
    RadialResidualReport rep;
    RadialProfile prev;
    bool have = false;
    for (int j = 0; j <= 10; ++j) {
        const double C = std::ldexp(1.0, j);
        std::vector<double> o(p.phi.size());
        for (std::size_t k = 0; k < o.size(); ++k) o[k] = std::min(p.phi[k] + C, 0.0);
        RadialProfile cur = radial_envelope(like(p, std::move(o), p.nu));
        rep.C.push_back(C);
        if (have) {
            double ch = profile_sup_distance(cur, prev);
            rep.change.push_back(ch);
            if (ch < tol) {
                rep.stabilized = true;
                if (report) *report = rep;
                return cur;
            }
        }
        prev = std::move(cur);
        have = true;
    }
    if (report) *report = rep;
    throw ConvergenceError("radial residual not stabilized at C = 2^10");
}

double legendre(const RadialProfile& p, double lam) {
    if (lam < p.nu - 1e-12) return kInf;
    double best = -kInf;
    for (int k = 0; k < p.size(); ++k) best = std::max(best, lam * p.s(k) - p.phi[static_cast<std::size_t>(k)]);
    return best;
}

RadialProfile radial_geodesic(const RadialProfile& p0, const RadialProfile& p1, double t) {
    require_same_grid(p0, p1);
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("radial_geodesic needs t in [0, 1]");
    if (t == 0.0) return p0;
    if (t == 1.0) return p1;
    const double lo = std::max(p0.nu, p1.nu);
    // The transform of a piecewise-linear interpolant is piecewise linear with
    // breaks at the segment slopes, so these slopes carry the exact answer.
    std::vector<double> lams{lo};
    for (const RadialProfile* p : {&p0, &p1})
        for (int k = 0; k + 1 < p->size(); ++k) {
            double l = (p->phi[static_cast<std::size_t>(k + 1)] - p->phi[static_cast<std::size_t>(k)]) / p->ds;
            if (l > lo) lams.push_back(l);
        }
    std::sort(lams.begin(), lams.end());
    lams.erase(std::unique(lams.begin(), lams.end()), lams.end());
    std::vector<double> psi(lams.size());
    for (std::size_t j = 0; j < lams.size(); ++j)
        psi[j] = (1.0 - t) * legendre(p0, std::max(lams[j], p0.nu)) + t * legendre(p1, std::max(lams[j], p1.nu));
    std::vector<double> out(p0.phi.size());
    for (int k = 0; k < p0.size(); ++k) {
        double best = -kInf;
        for (std::size_t j = 0; j < lams.size(); ++j) best = std::max(best, lams[j] * p0.s(k) - psi[j]);
        out[static_cast<std::size_t>(k)] = best;
    }
    return like(p0, std::move(out), lo);
}

double profile_sup_distance(const RadialProfile& a, const RadialProfile& b) {
    require_same_grid(a, b);
    double d = 0.0;
    for (std::size_t k = 0; k < a.phi.size(); ++k) d = std::max(d, std::abs(a.phi[k] - b.phi[k]));
    return d;
}

double radial_sup_gap(const GridFunction& u, const RadialProfile& p, const std::vector<char>* mask) {
    const Grid& g = u.grid();
    double gap = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.is_carrier(i) || (mask && !(*mask)[i])) continue;
        double s = std::log(g.domain().gauge(g.point(i)));
        gap = std::max(gap, std::abs(u.value(i) - p.value(s)));
    }
    return gap;
}

void write_profile_csv(std::ostream& os, const RadialProfile& p) {
    os << "s,phi\n" << std::setprecision(17);
    for (int k = 0; k < p.size(); ++k) os << p.s(k) << ',' << p.phi[static_cast<std::size_t>(k)] << '\n';
}

RadialProfile read_profile_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidArgument("empty profile csv");
    std::vector<double> s, phi;
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ls(line);
        double a, b;
        char comma;
        if (!(ls >> a >> comma >> b) || comma != ',')
            throw InvalidArgument("profile csv row " + std::to_string(row) + ": expected 's,phi'");
        s.push_back(a);
        phi.push_back(b);
    }
    RadialProfile p = profile_from_samples(std::move(phi));
    for (int k = 0; k < p.size(); ++k)
        if (std::abs(s[static_cast<std::size_t>(k)] - p.s(k)) > 1e-9)
            throw InvalidArgument("profile csv: s column is not the standard grid over [-8, 0]");
    return p;
}

}  // namespace pluri
