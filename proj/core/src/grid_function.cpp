#include "pluri/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pluri/error.hpp"

namespace pluri {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_poles(const std::vector<PoleSpec>& a, const std::vector<PoleSpec>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!a[i].same_carrier(b[i]) || a[i].c != b[i].c) return false;
    return true;
}

}  // namespace

Skeleton::Skeleton(GridPtr grid, std::vector<PoleSpec> poles) : grid_(std::move(grid)), poles_(std::move(poles)) {
    sort_poles(poles_);
    const Grid& g = *grid_;
    const Domain& dom = g.domain();
    const std::size_t M = g.size();
    const int L = g.lines();
    const StepTable& st = g.stencil();
    node_.assign(M, 0.0);
    carrier_.assign(M, 0);
    cross_.assign(st.crossings.size(), 0.0);
    sigma_.assign(M * static_cast<std::size_t>(L), 0.0);
    if (poles_.empty()) return;

    std::vector<double> single(M);
    for (const auto& p : poles_) {
        for (std::size_t i = 0; i < M; ++i) {
            bool on = on_carrier(g, p, i);
            single[i] = on ? -kInf : pole_model_value(dom, p, g.point(i));
            if (on) carrier_[i] = 1;
            node_[i] += p.c * single[i];
        }
        for (std::size_t c = 0; c < st.crossings.size(); ++c)
            cross_[c] += p.c * pole_model_value(dom, p, st.crossings[c].point);

        const bool kinks = pole_has_kinks(dom, p);
        for (std::size_t i = 0; i < M; ++i) {
            if (on_carrier(g, p, i)) continue;
            for (int l = 0; l < L; ++l) {
                double s = 0.0;
                if (kinks) {
                    // Sampled second difference; the kink carries positive mass
                    // that a pointwise Levi form would miss.
                    bool finite = true;
                    double sum = 0.0;
                    for (int k = 4 * l; k < 4 * l + 4; ++k) {
                        int nb = st.at(i, k);
                        double val;
                        if (nb >= 0) {
                            val = single[static_cast<std::size_t>(nb)];
                        } else {
                            const Crossing& cr = st.crossings[static_cast<std::size_t>(-nb - 1)];
                            double b = pole_model_value(dom, p, cr.point);
                            val = single[i] + (b - single[i]) / cr.theta;
                        }
                        if (!std::isfinite(val)) finite = false;
                        sum += val;
                    }
                    s = finite ? std::max(0.0, sum - 4.0 * single[i]) : 0.0;
                } else {
                    const Direction& d = g.directions()[static_cast<std::size_t>(l)];
                    double len = d.length * g.h();
                    s = 4.0 * len * len * pole_levi_form(dom, p, g.point(i), d.unit);
                }
                sigma_[i * static_cast<std::size_t>(L) + static_cast<std::size_t>(l)] += p.c * s;
            }
        }
    }
}

SkeletonPtr make_skeleton(GridPtr grid, std::vector<PoleSpec> poles) {
    return std::make_shared<const Skeleton>(std::move(grid), std::move(poles));
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> background, std::vector<double> boundary,
                           SkeletonPtr skeleton)
    : grid_(std::move(grid)), bg_(std::move(background)), bd_(std::move(boundary)), skel_(std::move(skeleton)) {
    if (!grid_) throw InvalidArgument("grid function without grid");
    if (bg_.size() != grid_->size()) throw InvalidArgument("background size does not match grid");
    if (bd_.size() != grid_->stencil().crossings.size()) throw InvalidArgument("boundary size does not match grid");
    if (!skel_) skel_ = make_skeleton(grid_, {});
    for (double v : bg_)
        if (!std::isfinite(v)) throw InvalidArgument("background values must be finite");
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> background, std::vector<double> boundary,
                           std::vector<PoleSpec> poles)
    : GridFunction(grid, std::move(background), std::move(boundary), make_skeleton(grid, std::move(poles))) {}

GridFunction GridFunction::constant(GridPtr grid, double c) {
    std::vector<double> bg(grid->size(), c), bd(grid->stencil().crossings.size(), c);
    return GridFunction(grid, std::move(bg), std::move(bd), std::vector<PoleSpec>{});
}

std::vector<double> GridFunction::values() const {
    std::vector<double> v(bg_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = value(i);
    return v;
}

std::vector<double> GridFunction::boundary_values() const {
    std::vector<double> v(bd_.size());
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = boundary_value(c);
    return v;
}

double GridFunction::scale() const {
    double s = 0.0;
    for (double v : bg_) s = std::max(s, std::abs(v));
    for (double v : bd_)
        if (std::isfinite(v)) s = std::max(s, std::abs(v));
    return s;
}

GridFunction GridFunction::with_background(std::vector<double> background, std::vector<double> boundary) const {
    return GridFunction(grid_, std::move(background), std::move(boundary), skel_);
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (a.grid_ptr() != b.grid_ptr() &&
        !(a.grid().domain() == b.grid().domain() && a.grid().resolution() == b.grid().resolution()))
        throw InvalidArgument("grid functions live on different grids");
}

double sup_distance(const GridFunction& u, const GridFunction& v, const std::vector<char>* mask) {
    require_same_grid(u, v);
    double s = 0.0;
    const bool same = same_poles(u.poles(), v.poles());
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (mask && !(*mask)[i]) continue;
        if (same) {
            s = std::max(s, std::abs(u.background()[i] - v.background()[i]));
            continue;
        }
        double a = u.value(i), b = v.value(i);
        if (std::isfinite(a) != std::isfinite(b)) return kInf;
        if (std::isfinite(a)) s = std::max(s, std::abs(a - b));
    }
    if (!same) {
        for (const auto& p : u.poles())
            if (coefficient_of(v.poles(), p) != p.c) return kInf;
        for (const auto& p : v.poles())
            if (coefficient_of(u.poles(), p) != p.c) return kInf;
    }
    return s;
}

double sup_excess(const GridFunction& u, const GridFunction& v, const std::vector<char>* mask) {
    require_same_grid(u, v);
    const bool same = same_poles(u.poles(), v.poles());
    double s = -kInf;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (mask && !(*mask)[i]) continue;
        if (same) {
            s = std::max(s, u.background()[i] - v.background()[i]);
            continue;
        }
        double a = u.value(i), b = v.value(i);
        if (!std::isfinite(b)) {
            if (std::isfinite(a)) return kInf;
            continue;
        }
        if (std::isfinite(a)) s = std::max(s, a - b);
    }
    if (!same)
        for (const auto& p : v.poles())
            if (coefficient_of(u.poles(), p) < p.c) return kInf;
    return s;
}

}  // namespace pluri
