#include "pluri/psh.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "pluri/cone.hpp"
#include "pluri/envelope.hpp"
#include "pluri/error.hpp"
#include "pluri/tolerances.hpp"
#include "hessian.hpp"

namespace pluri {

namespace detail {

using C = std::complex<double>;

HessianStencil hessian_stencil(const Grid& g) {
    HessianStencil hs{};
    auto idx = [&](Offset o) {
        int k = g.step_index(o);
        if (k < 0) throw Error("stencil lacks a Hessian step");
        return k;
    };
    for (int a = 0; a < 4; ++a) {
        Offset p{}, m{};
        p[a] = 1;
        m[a] = -1;
        hs.ax[a][0] = idx(p);
        hs.ax[a][1] = idx(m);
    }
    const int pairs[4][2] = {{0, 2}, {1, 3}, {0, 3}, {1, 2}};
    for (int q = 0; q < 4; ++q) {
        int a = pairs[q][0], b = pairs[q][1];
        Offset pp{}, mm{}, pm{}, mp{};
        pp[a] = 1, pp[b] = 1;
        mm[a] = -1, mm[b] = -1;
        pm[a] = 1, pm[b] = -1;
        mp[a] = -1, mp[b] = 1;
        hs.mix[q][0] = idx(pp);
        hs.mix[q][1] = idx(mm);
        hs.mix[q][2] = idx(pm);
        hs.mix[q][3] = idx(mp);
    }
    return hs;
}

Hess centered_hessian(const Grid& g, const HessianStencil& hs, std::span<const double> w, std::span<const double> bd,
                      std::size_t i) {
    const double h2 = g.h() * g.h();
    auto val = [&](int k) { return step_value(g, w, bd, i, k); };
    double second[4];
    for (int a = 0; a < 4; ++a) second[a] = (val(hs.ax[a][0]) + val(hs.ax[a][1]) - 2.0 * w[i]) / h2;
    double mixed[4];
    for (int q = 0; q < 4; ++q)
        mixed[q] = (val(hs.mix[q][0]) + val(hs.mix[q][1]) - val(hs.mix[q][2]) - val(hs.mix[q][3])) / (4.0 * h2);
    Hess H;
    H.a = 0.25 * (second[0] + second[1]);
    H.d = 0.25 * (second[2] + second[3]);
    H.b = 0.25 * C(mixed[0] + mixed[1], mixed[2] - mixed[3]);
    return H;
}

Hess skeleton_hessian(const Grid& g, const Skeleton& skel, std::size_t i) {
    const auto& s = skel.line_curvature();
    const std::size_t L = static_cast<std::size_t>(g.lines());
    const double h2 = g.h() * g.h();
    Hess H;
    H.a = s[i * L + 0] / (4.0 * h2);
    H.d = s[i * L + 1] / (4.0 * h2);
    double f2 = s[i * L + 2] / (8.0 * h2);
    double f4 = s[i * L + 4] / (8.0 * h2);
    H.b = C(f2 - 0.5 * (H.a + H.d), f4 - 0.5 * (H.a + H.d));
    return H;
}

double clamped_det(const Hess& H) {
    if (H.a < 0.0 || H.d < 0.0) return 0.0;
    double det = H.a * H.d - std::norm(H.b);
    return det > 0.0 ? det : 0.0;
}

}  // namespace detail

namespace {

using namespace detail;
using C = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Nodal MA masses in C^2 by the divergence identity
//   2 det H = sum_j d/dz_j F_j,  F_1 = u_1bar d - u_2bar conj(b),  F_2 = u_2bar a - u_1bar b,
// so that interior sums telescope; nodes next to the boundary use the local
// clamped determinant.
std::vector<double> conservative_masses(const Grid& g, std::span<const double> w, std::span<const double> bd) {
    const std::size_t M = g.size();
    const HessianStencil hs = hessian_stencil(g);
    const double h = g.h();
    std::vector<C> F1(M), F2(M);
    std::vector<double> local(M);
    for (std::size_t i = 0; i < M; ++i) {
        Hess H = centered_hessian(g, hs, w, bd, i);
        local[i] = 32.0 * clamped_det(H) * g.node_volume(i);
        double grad[4];
        for (int a = 0; a < 4; ++a)
            grad[a] = (step_value(g, w, bd, i, hs.ax[a][0]) - step_value(g, w, bd, i, hs.ax[a][1])) / (2.0 * h);
        C u1b = 0.5 * C(grad[0], grad[1]);
        C u2b = 0.5 * C(grad[2], grad[3]);
        F1[i] = u1b * H.d - u2b * std::conj(H.b);
        F2[i] = u2b * H.a - u1b * H.b;
    }
    const StepTable& st = g.stencil();
    std::vector<double> m(M);
    for (std::size_t i = 0; i < M; ++i) {
        int nb[4][2];
        bool inner = true;
        for (int a = 0; a < 4; ++a)
            for (int s = 0; s < 2; ++s) {
                nb[a][s] = st.at(i, hs.ax[a][s]);
                if (nb[a][s] < 0) inner = false;
            }
        if (!inner) {
            m[i] = local[i];
            continue;
        }
        auto D = [&](const std::vector<C>& F, int a) {
            return (F[static_cast<std::size_t>(nb[a][0])] - F[static_cast<std::size_t>(nb[a][1])]) / (2.0 * h);
        };
        C d1 = 0.5 * (D(F1, 0) - C(0, 1) * D(F1, 1));
        C d2 = 0.5 * (D(F2, 2) - C(0, 1) * D(F2, 3));
        m[i] = 16.0 * (d1 + d2).real() * g.node_volume(i);
    }
    return m;
}

// Move negative nodal mass onto positive neighbors (one ring, then two),
// clamping whatever is left. Deterministic: nodes in index order.
void repair_positivity(const Grid& g, std::vector<double>& m) {
    const StepTable& st = g.stencil();
    const int S = st.size();
    std::vector<int> ring, ring2;
    std::vector<char> mark(m.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] >= 0.0) continue;
        double need = -m[i];
        ring.clear();
        mark[i] = 1;
        for (int k = 0; k < S; ++k) {
            int nb = st.at(i, k);
            if (nb >= 0 && !mark[static_cast<std::size_t>(nb)]) {
                mark[static_cast<std::size_t>(nb)] = 1;
                ring.push_back(nb);
            }
        }
        for (int pass = 0; pass < 2 && need > 0.0; ++pass) {
            std::vector<int>& set = pass == 0 ? ring : ring2;
            if (pass == 1) {
                ring2.clear();
                for (int j : ring)
                    for (int k = 0; k < S; ++k) {
                        int nb = st.at(static_cast<std::size_t>(j), k);
                        if (nb >= 0 && !mark[static_cast<std::size_t>(nb)]) {
                            mark[static_cast<std::size_t>(nb)] = 1;
                            ring2.push_back(nb);
                        }
                    }
            }
            double avail = 0.0;
            for (int j : set)
                if (m[static_cast<std::size_t>(j)] > 0.0) avail += m[static_cast<std::size_t>(j)];
            if (avail <= 0.0) continue;
            double take = std::min(need, avail);
            double f = 1.0 - take / avail;
            for (int j : set)
                if (m[static_cast<std::size_t>(j)] > 0.0) m[static_cast<std::size_t>(j)] *= f;
            need -= take;
        }
        m[i] = 0.0;
        mark[i] = 0;
        for (int j : ring) mark[static_cast<std::size_t>(j)] = 0;
        for (int j : ring2) mark[static_cast<std::size_t>(j)] = 0;
        ring2.clear();
    }
}

void reject_hyperplanes(const GridFunction& u) {
    for (const auto& p : u.poles())
        if (p.model == PoleModel::hyperplane)
            throw DomainError("Monge-Ampere measure undefined: hyperplane pole has infinite mass");
}

double atom_mass(int n, double c) { return std::pow(tol::two_pi * c, n); }

}  // namespace

MeasureField MeasureField::zero(GridPtr g) {
    MeasureField m;
    m.density.assign(g->size(), 0.0);
    m.grid = std::move(g);
    return m;
}

double MeasureField::regular_mass(const std::vector<char>* mask) const {
    double s = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i)
        if (!mask || (*mask)[i]) s += density[i] * grid->node_volume(i);
    return s;
}

double MeasureField::singular_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.mass;
    return s;
}

GridFunction truncate(const GridFunction& u, double t) {
    if (!(t > 0.0)) throw InvalidArgument("truncation level must be positive");
    std::vector<double> bg(u.size()), bd(u.boundary_background().size());
    for (std::size_t i = 0; i < bg.size(); ++i) bg[i] = std::max(u.value(i), -t);
    for (std::size_t c = 0; c < bd.size(); ++c) bd[c] = std::max(u.boundary_value(c), -t);
    return GridFunction(u.grid_ptr(), std::move(bg), std::move(bd), std::vector<PoleSpec>{});
}

PshReport is_psh(const GridFunction& u, double tol) {
    const Grid& g = u.grid();
    LineSystem sys = build_line_system(g, *u.skeleton(), u.boundary_background());
    PshReport r;
    std::size_t bad = 0;
    const double h2 = g.h() * g.h();
    for (std::size_t i = 0; i < g.size(); ++i) {
        bool node_bad = false;
        for (int l = 0; l < sys.lines; ++l) {
            double e = sys.excess(u.background(), i, l);
            if (e < r.worst) {
                r.worst = e;
                r.node = static_cast<int>(i);
                r.line = l;
            }
            double len = g.directions()[static_cast<std::size_t>(l)].length;
            if (e / (4.0 * len * len * h2) < -0.25) node_bad = true;
        }
        if (node_bad) ++bad;
    }
    r.verdict = r.worst >= -tol;
    r.bad_fraction = static_cast<double>(bad) / static_cast<double>(g.size());
    return r;
}

std::vector<double> ma_raw_masses(const GridFunction& u, bool conservative) {
    reject_hyperplanes(u);
    const Grid& g = u.grid();
    const std::size_t M = g.size();
    std::span<const double> w = u.background();
    std::span<const double> bd = u.boundary_background();
    std::vector<double> m(M, 0.0);
    if (g.n() == 1) {
        // Green functions are harmonic off their poles, so the Laplacian of the
        // background is the whole regular mass, carrier cell included.
        LineSystem sys = build_line_system(g, *u.skeleton(), bd);
        const double h2 = g.h() * g.h();
        for (std::size_t i = 0; i < M; ++i) m[i] = sys.excess(w, i, 0) * g.node_volume(i) / h2;
        return m;
    }
    if (u.bounded() && conservative) return conservative_masses(g, w, bd);
    const HessianStencil hs = hessian_stencil(g);
    // Kinked models are pluriharmonic off their ridges, which carry no
    // Monge-Ampere mass, so only smooth skeletons contribute a Hessian.
    bool smooth_skeleton = !u.bounded();
    for (const auto& p : u.poles())
        if (pole_has_kinks(g.domain(), p)) smooth_skeleton = false;
    for (std::size_t i = 0; i < M; ++i) {
        if (u.is_carrier(i)) continue;
        Hess H = centered_hessian(g, hs, w, bd, i);
        if (smooth_skeleton) {
            Hess S = skeleton_hessian(g, *u.skeleton(), i);
            H.a += S.a;
            H.d += S.d;
            H.b += S.b;
        }
        m[i] = 32.0 * clamped_det(H) * g.node_volume(i);
    }
    return m;
}

MeasureField ma_measure(const GridFunction& u, const MaOptions& opt) {
    reject_hyperplanes(u);
    PshReport pr = is_psh(u, 0.0);
    if (pr.bad_fraction > opt.psh_gate)
        throw DomainError("ma_measure: input is not plurisubharmonic (" + std::to_string(pr.bad_fraction * 100.0) +
                          "% of nodes violate the cone test)");
    const Grid& g = u.grid();
    std::vector<double> m = ma_raw_masses(u, opt.conservative);
    repair_positivity(g, m);
    MeasureField mf;
    mf.grid = u.grid_ptr();
    mf.density.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) mf.density[i] = m[i] / g.node_volume(i);
    for (const auto& p : u.poles()) mf.atoms.push_back({p.node, p.location, atom_mass(g.n(), p.c)});
    return mf;
}

MeasureField regular_part(const GridFunction& u, RegularPartReport* report, const MaOptions& opt) {
    MeasureField full = ma_measure(u, opt);
    full.atoms.clear();
    if (u.bounded()) {
        if (report) {
            report->t_levels = {0.0};
            report->masses = {full.regular_mass()};
            report->stable = true;
        }
        return full;
    }
    const Grid& g = u.grid();
    const double tm = tol::mass(g.n());
    const double schedule[] = {1, 2, 4, 8, 16};
    std::vector<char> mask(g.size());
    double prev = -1.0;
    bool stable = false;
    RegularPartReport rep;
    for (double t : schedule) {
        for (std::size_t i = 0; i < g.size(); ++i) mask[i] = (!u.is_carrier(i) && u.value(i) > -t) ? 1 : 0;
        double mass = full.regular_mass(&mask);
        rep.t_levels.push_back(t);
        rep.masses.push_back(mass);
        if (prev >= 0.0 && std::abs(mass - prev) < tm) {
            stable = true;
            break;
        }
        prev = mass;
    }
    rep.stable = stable;
    if (report) *report = rep;
    if (!stable) throw ConvergenceError("unstable regular mass");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (u.is_carrier(i)) {
            // In one variable the carrier cell keeps the background's mass.
            if (g.n() != 1) full.density[i] = 0.0;
        } else if (!mask[i]) {
            full.density[i] = 0.0;
        }
    }
    return full;
}

MeasureField singular_part(const GridFunction& u, SingularPartReport* report, double gap_tol) {
    const Grid& g = u.grid();
    MeasureField mf = MeasureField::zero(u.grid_ptr());
    reject_hyperplanes(u);
    for (const auto& p : u.poles()) mf.atoms.push_back({p.node, p.location, atom_mass(g.n(), p.c)});
    if (!report || u.bounded()) return mf;

    // Shrinking-ball estimate from deep truncations.
    SingularPartReport rep;
    const double t = 16.0;
    GridFunction ut = truncate(u, t);
    std::vector<double> m = ma_raw_masses(ut, true);
    repair_positivity(g, m);
    for (std::size_t j = 0; j < u.poles().size(); ++j) {
        const PoleSpec& p = u.poles()[j];
        // Separation from the other poles and from the boundary.
        double room = g.domain().radius * (1.0 - g.domain().gauge(p.location));
        for (const auto& q : u.poles()) {
            if (&q == &p) continue;
            double d2 = 0;
            for (int a = 0; a < g.dim(); ++a) d2 += (q.location[a] - p.location[a]) * (q.location[a] - p.location[a]);
            room = std::min(room, 0.5 * std::sqrt(d2));
        }
        double rho = std::min(0.5 * room, 5.0 * g.h());
        rho = std::max(rho, 2.5 * g.h());
        auto ball = g.ball_mask(p.location, rho);
        double est = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (ball[i]) est += m[i];
        SingularEstimate se;
        se.atom = mf.atoms[j];
        se.estimate = est;
        se.radius = rho;
        se.relative_gap = std::abs(est - se.atom.mass) / se.atom.mass;
        rep.worst_gap = std::max(rep.worst_gap, se.relative_gap);
        rep.poles.push_back(se);
    }
    *report = rep;
    if (rep.worst_gap > gap_tol) throw DomainError("non-Green-type singularity");
    return mf;
}

SingularityComparison compare_singularities(const GridFunction& u, const GridFunction& v, int K) {
    require_same_grid(u, v);
    SingularityComparison r;
    for (const auto& p : v.poles()) {
        if (coefficient_of(u.poles(), p) < p.c) {
            r.u_more_singular = false;
            r.C_K = kInf;
            return r;
        }
    }
    auto mask = u.grid().exhaustion_mask(K);
    double best = -kInf;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!mask[i]) continue;
        double a = u.value(i), b = v.value(i);
        if (!std::isfinite(a)) continue;  // pole of u dominates
        best = std::max(best, a - b);
    }
    r.u_more_singular = true;
    r.C_K = best;
    return r;
}

double capacity(GridPtr grid, const std::vector<char>& E, GridFunction* extremal) {
    if (E.size() != grid->size()) throw InvalidArgument("capacity: mask size mismatch");
    bool any = false;
    for (char e : E) any = any || e;
    if (!any) {
        if (extremal) *extremal = GridFunction::constant(grid, 0.0);
        return 0.0;
    }
    Obstacle h = Obstacle::unconstrained(grid);
    for (std::size_t i = 0; i < grid->size(); ++i)
        if (E[i]) h.values[i] = -1.0;
    GridFunction ext = envelope(h);
    double mass = ma_measure(ext).total_mass();
    if (extremal) *extremal = ext;
    return mass;
}

double cap_distance(const GridFunction& u, const GridFunction& v, double eps, int K) {
    require_same_grid(u, v);
    if (!(eps > 0.0)) throw InvalidArgument("cap_distance: eps must be positive");
    const Grid& g = u.grid();
    auto mask = g.exhaustion_mask(K);
    std::vector<char> E(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!mask[i]) continue;
        double a = u.value(i), b = v.value(i);
        if (!std::isfinite(a) || !std::isfinite(b)) {
            bool both = !std::isfinite(a) && !std::isfinite(b);
            // Equal singular parts: compare the backgrounds.
            double gap = kInf;
            if (both) {
                bool same = true;
                for (const auto& p : u.poles())
                    if (on_carrier(g, p, i) && coefficient_of(v.poles(), p) != p.c) same = false;
                for (const auto& p : v.poles())
                    if (on_carrier(g, p, i) && coefficient_of(u.poles(), p) != p.c) same = false;
                if (same) gap = std::abs(u.background()[i] - v.background()[i]);
            }
            E[i] = gap > eps;
            continue;
        }
        E[i] = std::abs(a - b) > eps;
    }
    return capacity(u.grid_ptr(), E);
}

std::vector<char> carrier_closure(const GridFunction& u) {
    const Grid& g = u.grid();
    std::vector<char> m(g.size(), 0);
    const StepTable& st = g.stencil();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!u.is_carrier(i)) continue;
        m[i] = 1;
        for (int k = 0; k < st.size(); ++k) {
            int nb = st.at(i, k);
            if (nb >= 0) m[static_cast<std::size_t>(nb)] = 1;
        }
    }
    return m;
}

}  // namespace pluri
