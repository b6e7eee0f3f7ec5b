#include "pluri/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hessian.hpp"
#include "pluri/cone.hpp"
#include "pluri/envelope.hpp"
#include "pluri/error.hpp"
#include "pluri/tolerances.hpp"

namespace pluri {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool smooth_skeleton(const Grid& g, const Skeleton& s) {
    if (s.empty()) return false;
    for (const auto& p : s.poles())
        if (pole_has_kinks(g.domain(), p)) return false;
    return true;
}

// Largest x with (a - alpha x)(d - delta x) - |b|^2 = tau and both factors >= 0.
double quadratic_step(double a, double d, double alpha, double delta, double bb, double tau) {
    const double K = tau + bb;
    const double p = a * delta + d * alpha;
    const double disc = (a * delta - d * alpha) * (a * delta - d * alpha) + 4.0 * alpha * delta * K;
    // Smaller root, written to avoid cancellation.
    const double q = p + std::sqrt(std::max(0.0, disc));
    return q > 0.0 ? 2.0 * (a * d - K) / q : (p - std::sqrt(std::max(0.0, disc))) / (2.0 * alpha * delta);
}

}  // namespace

std::vector<double> scheme_masses(const GridFunction& u) { return ma_raw_masses(u, false); }

GridFunction solve_dirichlet(const DirichletProblem& prob, SolveReport* report) {
    const MeasureField& mu = prob.mu;
    if (!mu.grid) throw InvalidArgument("dirichlet: measure has no grid");
    GridPtr gp = mu.grid;
    const Grid& g = *gp;
    const int n = g.n();
    const std::size_t M = g.size();
    if (!prob.boundary.valid()) throw InvalidArgument("dirichlet: boundary function missing");
    if (&prob.boundary.grid() != &g) throw InvalidArgument("dirichlet: boundary lives on another grid");
    if (!prob.boundary.bounded()) throw InvalidArgument("dirichlet: boundary data must be pole-free");
    if (mu.density.size() != M) throw InvalidArgument("dirichlet: density size mismatch");

    const double cap = 0.25 * std::pow(tol::two_pi, n);
    std::vector<double> target(M);
    for (std::size_t i = 0; i < M; ++i) {
        double t = mu.density[i] * g.node_volume(i);
        if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("dirichlet: density must be finite and >= 0");
        if (t > cap) throw DomainError("mass too concentrated at node " + std::to_string(i));
        target[i] = t;
    }

    std::vector<PoleSpec> poles;
    for (const auto& a : mu.atoms) {
        if (!(a.mass > 0.0)) continue;
        double c = std::pow(a.mass, 1.0 / n) / tol::two_pi;
        poles = merge_sum(poles, {make_green_pole(g, a.location, c)});
    }
    auto skel = make_skeleton(gp, poles);
    const auto& Sb = skel->crossing_values();
    std::vector<double> bd(g.stencil().crossings.size());
    for (std::size_t c = 0; c < bd.size(); ++c) bd[c] = prob.boundary.boundary_value(c) - Sb[c];
    LineSystem sys = build_line_system(g, *skel, bd);

    const SolverParams& par = prob.params;
    const double tol_res = par.tol_res > 0.0 ? par.tol_res : tol::res(n);
    double tol_change = par.tol_change > 0.0 ? par.tol_change : 1e-8 * std::pow(tol::two_pi, n);
    double omega = par.omega;
    if (omega <= 0.0) {
        double w = 2.0 / (1.0 + std::sin(std::numbers::pi / (g.resolution() - 1)));
        omega = n == 1 ? w : 1.0 + 0.5 * (w - 1.0);
    }

    std::vector<double> w(M);
    for (std::size_t i = 0; i < M; ++i) w[i] = prob.boundary.background()[i];
    const double h2 = g.h() * g.h();
    const bool use_s = smooth_skeleton(g, *skel);
    detail::HessianStencil hs{};
    if (n == 2) hs = detail::hessian_stencil(g);

    auto update = [&](std::size_t i) -> double {
        if (skel->carrier()[i]) {
            // The background at a pole only feeds its neighbors: keep it as
            // large as the cone allows.
            double b = sys.bound(w, i);
            return std::isfinite(b) ? b - w[i] : 0.0;
        }
        if (n == 1) {
            std::size_t s = sys.slot(i, 0);
            double need = target[i] * h2 / g.node_volume(i);
            double sum = sys.cst[s];
            for (int k = 0; k < 4; ++k)
                if (sys.nb[s * 4 + k] >= 0) sum += w[static_cast<std::size_t>(sys.nb[s * 4 + k])];
            return (sum - need) / sys.den[s] - w[i];
        }
        detail::Hess H0 = detail::centered_hessian(g, hs, w, bd, i);
        const double keep = w[i];
        w[i] = keep + 1.0;
        detail::Hess H1 = detail::centered_hessian(g, hs, w, bd, i);
        w[i] = keep;
        double alpha = H0.a - H1.a, delta = H0.d - H1.d;
        if (use_s) {
            detail::Hess S = detail::skeleton_hessian(g, *skel, i);
            H0.a += S.a;
            H0.d += S.d;
            H0.b += S.b;
        }
        double tau = target[i] / (32.0 * g.node_volume(i));
        return quadratic_step(H0.a, H0.d, alpha, delta, std::norm(H0.b), tau);
    };

    auto residual = [&](const GridFunction& u) {
        std::vector<double> m = scheme_masses(u);
        double r = 0.0, tot = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            if (n == 2 && skel->carrier()[i]) continue;
            r = std::max(r, std::abs(m[i] - target[i]));
            tot += m[i];
        }
        return std::pair{r, tot};
    };

    int sweeps = 0;
    for (int refine = 0;; ++refine) {
        double change = kInf;
        while (change >= tol_change) {
            if (sweeps >= par.max_sweeps)
                throw ConvergenceError("dirichlet: no convergence after " + std::to_string(sweeps) + " sweeps");
            change = 0.0;
            for (std::size_t k = 0; k < M; ++k) {
                std::size_t i = par.reverse_order ? M - 1 - k : k;
                double dx = update(i);
                double step = (skel->carrier()[i] ? 1.0 : omega) * dx;
                w[i] += step;
                change = std::max(change, std::abs(step));
            }
            ++sweeps;
        }
        GridFunction u(gp, w, bd, skel);
        auto [res, tot] = residual(u);
        if (res <= tol_res || refine == 3) {
            if (res > tol_res)
                throw ConvergenceError("dirichlet: no convergence (residual " + std::to_string(res) + ")");
            if (report) {
                report->sweeps = sweeps;
                report->residual = res;
                report->total_mass = tot;
                report->total_target = 0.0;
                for (double t : target) report->total_target += t;
                report->poles = skel->poles();
            }
            return u;
        }
        tol_change *= 0.1;
    }
}

Decomposition decompose(const GridFunction& u, double tol, const SolverParams& params) {
    const Grid& g = u.grid();
    if (tol <= 0.0) tol = tol::comp(data_scale(u));
    MaOptions local;
    local.conservative = false;
    Decomposition d;
    MeasureField mr = regular_part(u, nullptr, local);
    MeasureField ms = singular_part(u);
    GridFunction zero = GridFunction::constant(u.grid_ptr(), 0.0);
    d.u_r = solve_dirichlet({mr, zero, params});
    d.u_s = solve_dirichlet({ms, zero, params});
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (u.is_carrier(i)) continue;
        double uv = u.value(i), r = d.u_r.value(i), s = d.u_s.value(i);
        d.viol_r = std::max(d.viol_r, uv - r);
        d.viol_s = std::max(d.viol_s, uv - s);
        double e = r + s - uv;
        if (e > d.viol_sum) {
            d.viol_sum = e;
            d.worst_node = static_cast<int>(i);
        }
    }
    std::vector<double> m = scheme_masses(d.u_r);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.n() == 2 && u.is_carrier(i)) continue;
        d.regular_match = std::max(d.regular_match, std::abs(m[i] - mr.cell_mass(i)));
    }
    d.atoms_match = d.u_s.poles().size() == u.poles().size();
    for (std::size_t j = 0; d.atoms_match && j < u.poles().size(); ++j)
        d.atoms_match = d.u_s.poles()[j].same_carrier(u.poles()[j]) &&
                        std::abs(d.u_s.poles()[j].c - u.poles()[j].c) <= 1e-12 * u.poles()[j].c;
    d.ok = d.viol_r < tol && d.viol_s < tol && d.viol_sum < tol && d.atoms_match &&
           d.regular_match < tol::res(g.n());
    if (!d.ok) {
        if (d.viol_sum >= tol)
            d.message = "u_r + u_s <= u fails by " + std::to_string(d.viol_sum) + " at node " +
                        std::to_string(d.worst_node);
        else if (d.viol_r >= tol)
            d.message = "u <= u_r fails by " + std::to_string(d.viol_r);
        else if (d.viol_s >= tol)
            d.message = "u <= u_s fails by " + std::to_string(d.viol_s);
        else if (!d.atoms_match)
            d.message = "atom lists differ";
        else
            d.message = "regular measure mismatch " + std::to_string(d.regular_match);
    }
    return d;
}

ComparisonReport comparison_check(const GridFunction& u, const GridFunction& v, double tol_comp) {
    require_same_grid(u, v);
    const Grid& g = u.grid();
    if (tol_comp <= 0.0) tol_comp = tol::comp(data_scale(u, v));
    ComparisonReport r;
    std::vector<double> mu = scheme_masses(u), mv = scheme_masses(v);
    double gap = -kInf;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.n() == 2 && (u.is_carrier(i) || v.is_carrier(i))) continue;
        gap = std::max(gap, mu[i] - mv[i]);
    }
    for (const auto& p : merge_max(u.poles(), v.poles())) {
        double au = std::pow(tol::two_pi * coefficient_of(u.poles(), p), g.n());
        double av = std::pow(tol::two_pi * coefficient_of(v.poles(), p), g.n());
        gap = std::max(gap, au - av);
    }
    r.hypothesis_gap = gap;
    r.hypothesis = gap <= tol::mass(g.n());
    r.singularity_order = compare_singularities(u, v, 2).u_more_singular;
    if (!r.hypothesis) {
        r.message = "hypothesis not met: MA(u) exceeds MA(v) by " + std::to_string(gap);
        return r;
    }
    double viol = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (u.is_carrier(i) || v.is_carrier(i)) continue;
        viol = std::max(viol, v.value(i) - u.value(i));
    }
    r.violation = viol;
    r.conclusion = viol < tol_comp;
    if (!r.conclusion) r.message = "u >= v fails by " + std::to_string(viol);
    return r;
}

BoundaryValuesReport boundary_values_check(const GridFunction& u, const GridFunction& w) {
    require_same_grid(u, w);
    const Grid& g = u.grid();
    BoundaryValuesReport r;
    try {
        MeasureField mu = ma_measure(u);
        double I = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double m = mu.cell_mass(i);
            if (m == 0.0) continue;
            if (w.is_carrier(i)) {
                r.integral_infinite = true;
                continue;
            }
            I += -w.value(i) * m;
        }
        for (const auto& a : mu.atoms) {
            if (w.is_carrier(static_cast<std::size_t>(a.node)))
                r.integral_infinite = true;
            else
                I += -w.value(static_cast<std::size_t>(a.node)) * a.mass;
        }
        r.integral = r.integral_infinite ? kInf : I;
        GridFunction ut = smallest_maximal_majorant(u);
        if (!ut.bounded()) {
            r.reason = "majorant keeps a hyperplane pole";
            return r;
        }
        ClassVerdict v = class_membership(u, CegrellClass::NH, &ut);
        r.verdict = v.verdict;
        r.reason = v.reason;
    } catch (const DomainError& e) {
        r.integral = kInf;
        r.integral_infinite = true;
        r.reason = e.what();
    }
    return r;
}

MeasureField random_measure(GridPtr grid, const ProblemSpec& spec) {
    const Grid& g = *grid;
    const int D = g.dim();
    const double R = g.domain().radius;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::uniform_int_distribution<int> K(-2, 2);

    struct Mode {
        std::array<int, 4> k{};
        double a = 0.0, phase = 0.0;
    };
    std::vector<Mode> modes(static_cast<std::size_t>(spec.modes));
    for (auto& m : modes) {
        for (int a = 0; a < D; ++a) m.k[a] = K(rng);
        m.a = 2.0 * U(rng) - 1.0;
        m.phase = 2.0 * std::numbers::pi * U(rng);
    }
    const double base = 0.5 + 0.5 * U(rng);

    MeasureField mf = MeasureField::zero(grid);
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point& x = g.point(i);
        double f = base;
        for (const auto& m : modes) {
            double arg = m.phase;
            for (int a = 0; a < D; ++a) arg += std::numbers::pi * m.k[a] * x[a] / R;
            f += m.a * std::cos(arg);
        }
        mf.density[i] = std::max(0.0, f);
        total += mf.density[i] * g.node_volume(i);
    }

    int lo = std::max(0, spec.min_atoms), hi = std::max(lo, spec.max_atoms);
    int count = std::uniform_int_distribution<int>(lo, hi)(rng);
    for (int tries = 0; static_cast<int>(mf.atoms.size()) < count && tries < 1000; ++tries) {
        Point p{};
        // Uniform direction and radius below half the domain.
        double norm = 0.0;
        for (int a = 0; a < D; ++a) {
            p[a] = 2.0 * U(rng) - 1.0;
            norm = std::max(norm, std::abs(p[a]));
        }
        double rad = 0.5 * R * U(rng);
        for (int a = 0; a < D; ++a) p[a] *= rad / std::max(norm, 1e-12) / std::sqrt(static_cast<double>(D));
        int node = g.nearest_node(p);
        if (node < 0) continue;
        bool far = true;
        for (const auto& q : mf.atoms) {
            double d2 = 0.0;
            for (int a = 0; a < D; ++a) d2 += (g.point(node)[a] - q.location[a]) * (g.point(node)[a] - q.location[a]);
            if (d2 < 9.0 * g.h() * g.h()) far = false;
        }
        if (!far) continue;
        double c = 0.5 + 1.5 * U(rng);
        mf.atoms.push_back({node, g.point(static_cast<std::size_t>(node)), std::pow(tol::two_pi * c, g.n())});
    }

    double want = spec.density_mass * std::pow(tol::two_pi, g.n());
    double s = total > 0.0 ? want / total : 0.0;
    for (auto& d : mf.density) d *= s;
    for (const auto& a : mf.atoms) mf.density[static_cast<std::size_t>(a.node)] = 0.0;
    return mf;
}

MeasureField scale_density(const MeasureField& mu, double s) {
    MeasureField m = mu;
    for (auto& d : m.density) d *= s;
    return m;
}

}  // namespace pluri
