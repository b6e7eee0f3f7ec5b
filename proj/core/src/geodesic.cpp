#include "pluri/geodesic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "hessian.hpp"
#include "offsets.hpp"
#include "pluri/cone.hpp"
#include "pluri/error.hpp"
#include "pluri/tolerances.hpp"

namespace pluri {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One lifted point of a 4-point line: stencil step (or -1 for the node
// itself) and slice shift.
struct LiftPoint {
    int step;
    int dt;
};

struct LiftLine {
    std::array<LiftPoint, 4> p;
    int xline;      // x-direction whose skeleton curvature applies, -1 for none
    int table;      // step table: 0 main stencil, k > 0 steps scaled by kXMultiples[k]
    bool t_only;    // pure t-line (waived on carriers)
};

// Mixed lines pair x-steps k h with t-steps j dt in the phases
// beta = (a + ib). A single x/t step ratio only bounds the real and imaginary
// parts of the mixed Hessian entry loosely, so several ratios j/k are used.
constexpr int kXMultiples[] = {1, 2, 3};
constexpr std::array<std::array<int, 2>, 5> kRatios = {{{1, 1}, {1, 2}, {1, 4}, {2, 1}, {3, 1}}};  // (k, j)

std::vector<LiftLine> lifted_lines(const Grid& g) {
    std::vector<LiftLine> out;
    const int L = g.lines();
    for (int l = 0; l < L; ++l)
        out.push_back({{{{4 * l, 0}, {4 * l + 1, 0}, {4 * l + 2, 0}, {4 * l + 3, 0}}}, l, 0, false});
    out.push_back({{{{-1, 1}, {-1, -1}, {-1, 1}, {-1, -1}}}, -1, 0, true});
    for (int l = 0; l < L; ++l) {
        const int sv = 4 * l, smv = 4 * l + 1, siv = 4 * l + 2, smiv = 4 * l + 3;
        for (const auto& [k, j] : kRatios) {
            const int table = k == 1 ? 0 : k == 2 ? 1 : 2;
            for (int a = -2; a <= 2; ++a)
                for (int b = -2; b <= 2; ++b) {
                    if ((a == 0 && b == 0) || std::gcd(a, b) != 1 || std::abs(a) + std::abs(b) > 3) continue;
                    // lambda = 1, -1, i, -i move t by Re(lambda beta).
                    out.push_back({{{{sv, a * j}, {smv, -a * j}, {siv, -b * j}, {smiv, b * j}}}, l, table, false});
                }
        }
    }
    return out;
}

std::vector<StepTable> long_tables(const Grid& g) {
    std::vector<StepTable> t;
    for (std::size_t k = 1; k < std::size(kXMultiples); ++k) {
        std::vector<Offset> steps;
        for (const auto& s : g.stencil().steps) {
            Offset o{};
            for (int a = 0; a < 4; ++a) o[a] = s[a] * kXMultiples[k];
            steps.push_back(o);
        }
        t.push_back(g.build_table(steps));
    }
    return t;
}

// Backgrounds of both ends and of the boundary data relative to the shared
// skeleton; +inf where an end is less singular than the skeleton.
struct LiftData {
    const Grid* g = nullptr;
    int m = 0;
    SkeletonPtr skel;
    std::vector<double> E[2];
    std::vector<double> eb[2];
    std::vector<LiftLine> lines;
    std::vector<StepTable> tables;  // long x-steps
    // Main-stencil crossing at the same boundary point as each long crossing.
    std::vector<std::vector<std::size_t>> to_main;

    const StepTable& table(int k) const { return k == 0 ? g->stencil() : tables[static_cast<std::size_t>(k - 1)]; }

    std::vector<std::vector<double>> slice_bd;  // boundary background per slice, +inf where free
    detail::HessianStencil hs{};
    bool smooth_skel = false;
    bool centered = false;  // also require the centered lifted Hessian to be PSD

    double boundary_at(std::size_t c, double tau) const {
        double a = eb[0][c], b = eb[1][c];
        if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
        return (1.0 - tau) * a + tau * b;
    }
};

LiftData make_data(const GridFunction& u0, const GridFunction& u1, const SkeletonPtr& skel, int m,
                   bool centered = false) {
    LiftData d;
    d.centered = centered;
    d.g = &u0.grid();
    d.m = m;
    d.skel = skel;
    d.lines = lifted_lines(*d.g);
    d.tables = long_tables(*d.g);
    for (std::size_t t = 0; t < d.tables.size(); ++t) {
        const StepTable& lt = d.tables[t];
        std::vector<std::size_t> map(lt.crossings.size());
        for (std::size_t c = 0; c < lt.crossings.size(); ++c) {
            // The long step walks through main steps; its crossing is the one
            // of the first main step that leaves the interior.
            int node = lt.crossings[c].node;
            const int step = lt.crossings[c].step;
            for (;;) {
                int nb = d.g->stencil().at(static_cast<std::size_t>(node), step);
                if (nb < 0) {
                    map[c] = static_cast<std::size_t>(-nb - 1);
                    break;
                }
                node = nb;
            }
        }
        d.to_main.push_back(std::move(map));
    }
    const Grid& g = *d.g;
    const auto& cross = g.stencil().crossings;
    const GridFunction* ends[2] = {&u0, &u1};
    for (int e = 0; e < 2; ++e) {
        auto off = detail::offset_terms(ends[e]->poles(), skel->poles());
        d.E[e].resize(g.size());
        d.eb[e].resize(cross.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            d.E[e][i] = ends[e]->background()[i] + (off.empty() ? 0.0 : detail::offset_at_node(g, off, i));
        for (std::size_t c = 0; c < cross.size(); ++c)
            d.eb[e][c] = ends[e]->boundary_background()[c] +
                         (off.empty() ? 0.0 : detail::offset_at_point(g.domain(), off, cross[c].point));
    }
    d.slice_bd.resize(static_cast<std::size_t>(m + 1));
    for (int k = 0; k <= m; ++k) {
        auto& b = d.slice_bd[static_cast<std::size_t>(k)];
        b.resize(cross.size());
        for (std::size_t c = 0; c < cross.size(); ++c) b[c] = d.boundary_at(c, static_cast<double>(k) / m);
    }
    if (g.n() == 2) d.hs = detail::hessian_stencil(g);
    d.smooth_skel = !skel->empty();
    for (const auto& p : skel->poles())
        if (pole_has_kinks(g.domain(), p)) d.smooth_skel = false;
    return d;
}

// Folds the line into sum + cst - den * W(i,k) >= 0. Returns false for a free
// line (an end value or boundary value is +inf).
bool line_terms(const LiftData& d, const std::vector<std::vector<double>>& W, std::size_t i, int k,
                const LiftLine& line, double& sum, double& den) {
    const Grid& g = *d.g;
    const StepTable& st = d.table(line.table);
    const double dtau = 1.0 / d.m;
    sum = 0.0;
    den = 4.0;
    if (line.xline >= 0) {
        // Skeleton curvature scales with the squared step (exact for smooth
        // skeletons, an approximation across kinks).
        const double k = kXMultiples[line.table];
        sum += k * k *
               d.skel->line_curvature()[i * static_cast<std::size_t>(g.lines()) + static_cast<std::size_t>(line.xline)];
    }
    for (const auto& p : line.p) {
        const int kk = k + p.dt;
        if (kk < 0 || kk > d.m) return false;
        int nb = p.step < 0 ? static_cast<int>(i) : st.at(i, p.step);
        if (nb >= 0) {
            std::size_t j = static_cast<std::size_t>(nb);
            double v = kk == 0 ? d.E[0][j] : kk == d.m ? d.E[1][j] : W[static_cast<std::size_t>(kk)][j];
            if (!std::isfinite(v)) return false;
            sum += v;
            continue;
        }
        std::size_t c = static_cast<std::size_t>(-nb - 1);
        double th = st.crossings[c].theta;
        std::size_t mc = line.table == 0 ? c : d.to_main[static_cast<std::size_t>(line.table - 1)][c];
        double b = d.boundary_at(mc, (k + th * p.dt) * dtau);
        if (!std::isfinite(b)) return false;
        den += 1.0 / th - 1.0;
        sum += b / th;
    }
    return true;
}

const std::vector<double>& slice_values(const LiftData& d, const std::vector<std::vector<double>>& W, int k) {
    return k == 0 ? d.E[0] : k == d.m ? d.E[1] : W[static_cast<std::size_t>(k)];
}

using Cx = std::complex<double>;

// Principal minors of the Hermitian matrix [[a, b, c1], [conj b, d, c2],
// [conj c1, conj c2, e]] (n = 2) are all >= 0.
bool psd3(double a, double d, double e, Cx b, Cx c1, Cx c2) {
    if (a < 0.0 || d < 0.0 || e < 0.0) return false;
    if (a * d - std::norm(b) < 0.0 || a * e - std::norm(c1) < 0.0 || d * e - std::norm(c2) < 0.0) return false;
    double det = a * d * e + 2.0 * (b * c2 * std::conj(c1)).real() - a * std::norm(c2) - d * std::norm(c1) -
                 e * std::norm(b);
    return det >= -1e-14 * std::max({a * d * e, 1e-300});
}

// Largest increment x of W(i,k) keeping the centered lifted complex Hessian
// positive semidefinite, with the mixed (x, t) entries lagged. +inf when the
// Hessian cannot be formed (free data nearby or a pole node).
double psd_increment(const LiftData& d, const std::vector<std::vector<double>>& W, std::size_t i, int k) {
    const Grid& g = *d.g;
    if (d.skel->carrier()[i]) return kInf;
    const std::vector<double>& w = slice_values(d, W, k);
    const std::vector<double>& wp = slice_values(d, W, k + 1);
    const std::vector<double>& wm = slice_values(d, W, k - 1);
    if (!std::isfinite(wp[i]) || !std::isfinite(wm[i])) return kInf;
    const auto& bd = d.slice_bd[static_cast<std::size_t>(k)];
    const auto& bdp = d.slice_bd[static_cast<std::size_t>(k + 1)];
    const auto& bdm = d.slice_bd[static_cast<std::size_t>(k - 1)];
    const StepTable& st = g.stencil();
    const int S = st.size();
    for (int s = 0; s < S; ++s) {
        int nb = st.at(i, s);
        if (nb >= 0) {
            std::size_t j = static_cast<std::size_t>(nb);
            if (!std::isfinite(wp[j]) || !std::isfinite(wm[j])) return kInf;
        } else {
            std::size_t c = static_cast<std::size_t>(-nb - 1);
            if (!std::isfinite(bd[c]) || !std::isfinite(bdp[c]) || !std::isfinite(bdm[c])) return kInf;
        }
    }
    const double h = g.h();
    const double dt = 1.0 / d.m;
    const double e0 = 0.25 * (wp[i] + wm[i] - 2.0 * w[i]) / (dt * dt);
    const double eps = 0.5 / (dt * dt);
    // d/dzbar_j of a slice by centered differences along the steps of the
    // real and imaginary axes of z_j.
    auto dzbar = [&](const std::vector<double>& f, const std::vector<double>& b, int sxp, int sxm, int syp, int sym) {
        double fx = (step_value(g, f, b, i, sxp) - step_value(g, f, b, i, sxm)) / (2.0 * h);
        double fy = (step_value(g, f, b, i, syp) - step_value(g, f, b, i, sym)) / (2.0 * h);
        return 0.5 * Cx(fx, fy);
    };
    // U_{z_j taubar} = conj(U_{tau zbar_j}) = conj((1/2) d/dzbar_j V_t).
    auto mixed = [&](int sxp, int sxm, int syp, int sym) {
        return std::conj(0.5 * (dzbar(wp, bdp, sxp, sxm, syp, sym) - dzbar(wm, bdm, sxp, sxm, syp, sym)) / (2.0 * dt));
    };
    // The slice is modified in place to read off the linear dependence of
    // the diagonal entries on W(i,k), then restored.
    std::vector<double>& wk = const_cast<std::vector<double>&>(w);
    const double keep = wk[i];
    if (g.n() == 1) {
        auto lap = [&]() {
            double sum = 0.0;
            for (int s = 0; s < 4; ++s) sum += step_value(g, wk, bd, i, s);
            return (sum - 4.0 * wk[i]) / (4.0 * h * h);
        };
        double a0 = lap();
        wk[i] = keep + 1.0;
        double alpha = a0 - lap();
        wk[i] = keep;
        if (d.smooth_skel) a0 += d.skel->line_curvature()[i] / (4.0 * h * h);
        const double K = std::norm(mixed(0, 1, 2, 3));
        // Largest x with (a0 - alpha x)(e0 - eps x) = K on the admissible branch.
        const double p = a0 * eps + e0 * alpha;
        const double disc = (a0 * eps - e0 * alpha) * (a0 * eps - e0 * alpha) + 4.0 * alpha * eps * K;
        const double q = p + std::sqrt(std::max(0.0, disc));
        return q > 0.0 ? 2.0 * (a0 * e0 - K) / q : (p - std::sqrt(std::max(0.0, disc))) / (2.0 * alpha * eps);
    }
    const auto& hs = d.hs;
    detail::Hess H0 = detail::centered_hessian(g, hs, wk, bd, i);
    wk[i] = keep + 1.0;
    detail::Hess H1 = detail::centered_hessian(g, hs, wk, bd, i);
    wk[i] = keep;
    const double alpha = H0.a - H1.a, delta = H0.d - H1.d;
    if (d.smooth_skel) {
        detail::Hess Sk = detail::skeleton_hessian(g, *d.skel, i);
        H0.a += Sk.a;
        H0.d += Sk.d;
        H0.b += Sk.b;
    }
    const Cx c1 = mixed(hs.ax[0][0], hs.ax[0][1], hs.ax[1][0], hs.ax[1][1]);
    const Cx c2 = mixed(hs.ax[2][0], hs.ax[2][1], hs.ax[3][0], hs.ax[3][1]);
    auto ok = [&](double x) { return psd3(H0.a - alpha * x, H0.d - delta * x, e0 - eps * x, H0.b, c1, c2); };
    // Admissible increments form a half-line; bracket its end and bisect.
    const double scale = std::max({std::abs(H0.a) / alpha, std::abs(H0.d) / delta, std::abs(e0) / eps, 1e-12});
    double lo = 0.0, hi = scale;
    if (ok(hi)) return hi;
    if (!ok(lo)) {
        hi = 0.0;
        lo = -scale;
        for (int tries = 0; !ok(lo) && tries < 60; ++tries) lo *= 2.0;
        if (!ok(lo)) return -kInf;
    }
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

double node_bound(const LiftData& d, const std::vector<std::vector<double>>& W, std::size_t i, int k) {
    double best = d.centered ? W[static_cast<std::size_t>(k)][i] + psd_increment(d, W, i, k) : kInf;
    const bool carrier = d.skel->carrier()[i] != 0;
    for (const auto& line : d.lines) {
        if (line.t_only && carrier) continue;
        double sum, den;
        if (!line_terms(d, W, i, k, line, sum, den)) continue;
        best = std::min(best, sum / den);
    }
    return best;
}

GeodesicField assemble(const GridFunction& u0, const GridFunction& u1, const LiftData& d,
                       std::vector<std::vector<double>> W) {
    GeodesicField V;
    V.grid = u0.grid_ptr();
    V.m = d.m;
    for (int k = 0; k <= d.m; ++k) V.t.push_back(static_cast<double>(k) / d.m);
    V.skeleton = d.skel;
    V.slices = std::move(W);
    V.u0 = u0;
    V.u1 = u1;
    return V;
}

SkeletonPtr shared_skeleton(const GridFunction& u0, const GridFunction& u1, bool& mismatch) {
    auto poles = merge_max(u0.poles(), u1.poles());
    mismatch = poles.size() != u0.poles().size() || poles.size() != u1.poles().size();
    for (const auto& p : poles)
        if (coefficient_of(u0.poles(), p) != coefficient_of(u1.poles(), p)) mismatch = true;
    return make_skeleton(u0.grid_ptr(), poles);
}

std::vector<std::vector<double>> linear_slices(const LiftData& d) {
    const std::size_t M = d.g->size();
    const auto& S = d.skel->node_values();
    std::vector<std::vector<double>> W(static_cast<std::size_t>(d.m + 1));
    for (int k = 1; k < d.m; ++k) {
        const double t = static_cast<double>(k) / d.m;
        auto& w = W[static_cast<std::size_t>(k)];
        w.resize(M);
        for (std::size_t i = 0; i < M; ++i) {
            double lin = (1.0 - t) * d.E[0][i] + t * d.E[1][i];
            double cap = std::min(lin, -S[i]);
            w[i] = std::isfinite(cap) ? cap : 0.0;
        }
    }
    return W;
}

}  // namespace

GridFunction GeodesicField::slice(int k) const {
    if (k < 0 || k > m) throw InvalidArgument("slice index out of range");
    if (k == 0) return u0;
    if (k == m) return u1;
    LiftData d = make_data(u0, u1, skeleton, m);
    std::vector<double> bd(d.eb[0].size());
    const double tau = t[static_cast<std::size_t>(k)];
    for (std::size_t c = 0; c < bd.size(); ++c) {
        double b = d.boundary_at(c, tau);
        bd[c] = std::isfinite(b) ? b : 0.0;
    }
    return GridFunction(grid, slices[static_cast<std::size_t>(k)], std::move(bd), skeleton);
}

double GeodesicField::value(std::size_t i, int k) const {
    if (k == 0) return u0.value(i);
    if (k == m) return u1.value(i);
    return slices[static_cast<std::size_t>(k)][i] + skeleton->node_values()[i];
}

GeodesicField linear_lift(const GridFunction& u0, const GridFunction& u1, int m) {
    require_same_grid(u0, u1);
    if (m < 2) throw InvalidArgument("lift needs at least two intervals");
    bool mismatch = false;
    auto skel = shared_skeleton(u0, u1, mismatch);
    LiftData d = make_data(u0, u1, skel, m);
    GeodesicField V = assemble(u0, u1, d, linear_slices(d));
    V.pole_mismatch = mismatch;
    return V;
}

GeodesicField lift_of(const std::vector<GridFunction>& f) {
    if (f.size() < 3) throw InvalidArgument("lift needs at least three slices");
    const int m = static_cast<int>(f.size()) - 1;
    const GridFunction& u0 = f.front();
    const GridFunction& u1 = f.back();
    bool mismatch = false;
    auto skel = shared_skeleton(u0, u1, mismatch);
    LiftData d = make_data(u0, u1, skel, m);
    std::vector<std::vector<double>> W(static_cast<std::size_t>(m + 1));
    for (int k = 1; k < m; ++k) {
        const GridFunction& s = f[static_cast<std::size_t>(k)];
        require_same_grid(u0, s);
        auto off = detail::offset_terms(s.poles(), skel->poles());
        auto& w = W[static_cast<std::size_t>(k)];
        w.resize(u0.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            double o = off.empty() ? 0.0 : detail::offset_at_node(u0.grid(), off, i);
            w[i] = std::isfinite(o) ? s.background()[i] + o : 0.0;
        }
    }
    GeodesicField V = assemble(u0, u1, d, std::move(W));
    V.pole_mismatch = mismatch;
    return V;
}

LiftCheck lift_check(const GeodesicField& V, double tol, bool centered) {
    LiftData d = make_data(V.u0, V.u1, V.skeleton, V.m, centered);
    LiftCheck r;
    const std::size_t M = d.g->size();
    for (int k = 1; k < V.m; ++k) {
        const auto& w = V.slices[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < M; ++i) {
            const bool carrier = d.skel->carrier()[i] != 0;
            for (std::size_t l = 0; l < d.lines.size(); ++l) {
                if (d.lines[l].t_only && carrier) continue;
                double sum, den;
                if (!line_terms(d, V.slices, i, k, d.lines[l], sum, den)) continue;
                double e = sum - den * w[i];
                if (e < r.worst) {
                    r.worst = e;
                    r.node = static_cast<int>(i);
                    r.slice = k;
                    r.line = static_cast<int>(l);
                }
            }
            if (centered) {
                double e = psd_increment(d, V.slices, i, k);
                if (e < r.worst) {
                    r.worst = e;
                    r.node = static_cast<int>(i);
                    r.slice = k;
                    r.line = static_cast<int>(d.lines.size());
                }
            }
        }
    }
    r.verdict = r.worst >= -tol;
    return r;
}

GeodesicField largest_geodesic(const GridFunction& u0, const GridFunction& u1, int m, const EnvelopeOptions& opt,
                               bool centered) {
    require_same_grid(u0, u1);
    if (m < 8) throw InvalidArgument("largest_geodesic needs m >= 8 intervals");
    bool mismatch = false;
    auto skel = shared_skeleton(u0, u1, mismatch);
    LiftData d = make_data(u0, u1, skel, m, centered);
    auto W = linear_slices(d);
    auto cap = W;
    const std::size_t M = d.g->size();
    const double tol = opt.tol > 0.0 ? opt.tol : tol::env(data_scale(u0, u1));
    const double stop = opt.stop_factor * tol;
    double omega = opt.omega;
    if (omega <= 0.0) {
        double w = 2.0 / (1.0 + std::sin(std::numbers::pi / (d.g->resolution() - 1)));
        omega = 1.0 + 0.8 * (w - 1.0);
    }
    int sweeps = 0;
    double change = kInf;
    while (change >= stop) {
        if (sweeps >= opt.max_sweeps)
            throw ConvergenceError("largest_geodesic: no convergence after " + std::to_string(sweeps) + " sweeps");
        change = 0.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (int kk = 1; kk < m; ++kk) {
                const int k = pass == 0 ? kk : m - kk;
                auto& w = W[static_cast<std::size_t>(k)];
                const auto& c = cap[static_cast<std::size_t>(k)];
                for (std::size_t n = 0; n < M; ++n) {
                    const std::size_t i = pass == 0 ? n : M - 1 - n;
                    double target = std::min(node_bound(d, W, i, k), c[i]);
                    if (!std::isfinite(target)) continue;
                    double nw = std::min(c[i], w[i] + omega * (target - w[i]));
                    change = std::max(change, std::abs(nw - w[i]));
                    w[i] = nw;
                }
            }
        }
        sweeps += 2;
    }
    GeodesicField V = assemble(u0, u1, d, std::move(W));
    V.pole_mismatch = mismatch;
    V.sweeps = sweeps;
    return V;
}

EndpointLimit endpoint_limit(const GeodesicField& V, int end) {
    if (end != 0 && end != 1) throw InvalidArgument("endpoint must be 0 or 1");
    const int k1 = end == 0 ? 1 : V.m - 1;
    const int k2 = end == 0 ? 2 : V.m - 2;
    GridFunction s1 = V.slice(k1), s2 = V.slice(k2);
    std::vector<double> bg(s1.size()), bd(s1.boundary_background().size());
    for (std::size_t i = 0; i < bg.size(); ++i) bg[i] = 2.0 * s1.background()[i] - s2.background()[i];
    for (std::size_t c = 0; c < bd.size(); ++c)
        bd[c] = 2.0 * s1.boundary_background()[c] - s2.boundary_background()[c];
    EndpointLimit r;
    r.limit = GridFunction(V.grid, std::move(bg), std::move(bd), V.skeleton);
    const GridFunction& u = end == 0 ? V.u0 : V.u1;
    auto mask = V.grid->exhaustion_mask(2);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!mask[i] || u.is_carrier(i) || r.limit.is_carrier(i)) continue;
        r.gap = std::max(r.gap, std::abs(r.limit.value(i) - u.value(i)));
    }
    // A pole present in the limit but not in the data is an infinite gap.
    for (const auto& p : V.skeleton->poles()) {
        if (coefficient_of(u.poles(), p) == p.c) continue;
        if (p.model == PoleModel::hyperplane || mask[static_cast<std::size_t>(p.node)]) r.gap = kInf;
    }
    return r;
}

ConnectivityReport connectivity_test(const GridFunction& in0, const GridFunction& in1, const ConnectivityOptions& opt) {
    require_same_grid(in0, in1);
    ConnectivityReport r;
    EnvelopeOptions eo = opt.envelope;
    r.tol = eo.tol > 0.0 ? eo.tol : tol::env(data_scale(in0, in1));
    eo.tol = r.tol;
    r.gap_tol = opt.gap_factor * r.tol;
    // Sampled psh functions are psh only up to the scheme's consistency error;
    // every criterion works on the discrete psh projections.
    const GridFunction u0 = psh_projection(in0, eo), u1 = psh_projection(in1, eo);
    r.projection0 = sup_distance(u0, in0);
    r.projection1 = sup_distance(u1, in1);

    auto safe_rooftop = [&](const GridFunction& a, const GridFunction& b) {
        try {
            return sup_distance(asymptotic_rooftop(a, b, eo), b);
        } catch (const ConvergenceError&) {
            return kInf;
        }
    };
    r.darvas01 = safe_rooftop(u0, u1);
    r.darvas10 = safe_rooftop(u1, u0);
    r.verdict_darvas = r.darvas01 < r.tol && r.darvas10 < r.tol;

    GridFunction g0 = residual(u0, eo), g1 = residual(u1, eo);
    r.resid01 = std::max(0.0, sup_excess(u0, g1));
    r.resid10 = std::max(0.0, sup_excess(u1, g0));
    r.verdict_residual = r.resid01 < r.tol && r.resid10 < r.tol;

    GeodesicField V = largest_geodesic(u0, u1, opt.m, eo, opt.centered);
    r.pole_mismatch = V.pole_mismatch;
    r.gap0 = endpoint_limit(V, 0).gap;
    r.gap1 = endpoint_limit(V, 1).gap;
    r.verdict_endpoint = r.gap0 < r.gap_tol && r.gap1 < r.gap_tol;
    r.agree = r.verdict_darvas == r.verdict_residual && r.verdict_residual == r.verdict_endpoint;
    return r;
}

}  // namespace pluri
