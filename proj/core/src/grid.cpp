#include "pluri/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pluri/error.hpp"

namespace pluri {

namespace {

// Nodes closer than this fraction of h to the boundary are not interior.
constexpr double kInteriorMargin = 0.25;

std::vector<Direction> make_directions(int n) {
    using C = std::complex<double>;
    std::vector<Direction> d;
    if (n == 1) {
        d.push_back({{C(1, 0), C(0, 0)}, {1, 0, 0, 0}, {0, 1, 0, 0}, 1.0});
        return d;
    }
    const double s = 1.0 / std::sqrt(2.0);
    const double r2 = std::sqrt(2.0);
    d.push_back({{C(1, 0), C(0, 0)}, {1, 0, 0, 0}, {0, 1, 0, 0}, 1.0});
    d.push_back({{C(0, 0), C(1, 0)}, {0, 0, 1, 0}, {0, 0, 0, 1}, 1.0});
    d.push_back({{C(s, 0), C(s, 0)}, {1, 0, 1, 0}, {0, 1, 0, 1}, r2});
    d.push_back({{C(s, 0), C(-s, 0)}, {1, 0, -1, 0}, {0, 1, 0, -1}, r2});
    d.push_back({{C(s, 0), C(0, s)}, {1, 0, 0, 1}, {0, 1, -1, 0}, r2});
    d.push_back({{C(s, 0), C(0, -s)}, {1, 0, 0, -1}, {0, 1, 1, 0}, r2});
    return d;
}

Offset negate(const Offset& o) { return {-o[0], -o[1], -o[2], -o[3]}; }

}  // namespace

std::shared_ptr<const Grid> Grid::make(const Domain& domain, int resolution) {
    if (resolution < 9) throw InvalidArgument("stencil does not fit: resolution must be >= 9");
    std::shared_ptr<Grid> g(new Grid());
    g->domain_ = domain;
    g->N_ = resolution;
    g->h_ = 2.0 * domain.radius / (resolution - 1);
    const int dim = 2 * domain.n;
    g->cell_volume_ = std::pow(g->h_, dim);

    std::size_t total = 1;
    for (int k = 0; k < dim; ++k) total *= static_cast<std::size_t>(resolution);
    g->lattice_to_node_.assign(total, -1);

    const double limit = 1.0 - kInteriorMargin * g->h_ / domain.radius;
    for (std::size_t lin = 0; lin < total; ++lin) {
        auto idx = g->lattice_multi(lin);
        Point x = g->lattice_point(idx);
        if (domain.gauge(x) < limit) {
            g->lattice_to_node_[lin] = static_cast<int>(g->coords_.size());
            g->coords_.push_back(x);
            g->index_.push_back(idx);
        }
    }
    if (g->coords_.empty()) throw InvalidArgument("grid has no interior nodes");

    g->dirs_ = make_directions(domain.n);
    std::vector<Offset> steps;
    for (const auto& d : g->dirs_) {
        steps.push_back(d.v);
        steps.push_back(negate(d.v));
        steps.push_back(d.iv);
        steps.push_back(negate(d.iv));
    }
    g->stencil_ = g->build_table(steps);
    g->compute_node_volumes();
    return g;
}

void Grid::compute_node_volumes() {
    const int D = dim();
    const double R = domain_.radius;
    node_volume_.assign(size(), 0.0);
    // Cells that surely lie inside keep the full volume; the rest are
    // subsampled and each sample goes to the nearest interior node.
    const double reach = 0.5 * std::sqrt(static_cast<double>(D)) * h_ / R;
    const int s = D == 2 ? 16 : 4;
    const double sub = cell_volume_ / std::pow(static_cast<double>(s), D);
    std::size_t samples = 1;
    for (int a = 0; a < D; ++a) samples *= static_cast<std::size_t>(s);
    std::size_t hood = 1;
    for (int a = 0; a < D; ++a) hood *= 3;
    for (std::size_t lin = 0; lin < lattice_size(); ++lin) {
        auto idx = lattice_multi(lin);
        Point x = lattice_point(idx);
        double gx = domain_.gauge(x);
        int self = lattice_to_node_[lin];
        if (self >= 0 && gx + reach < 1.0) {
            node_volume_[static_cast<std::size_t>(self)] += cell_volume_;
            continue;
        }
        if (gx - reach >= 1.0) continue;
        for (std::size_t q = 0; q < samples; ++q) {
            Point y = x;
            std::size_t r = q;
            for (int a = 0; a < D; ++a) {
                y[a] += ((static_cast<double>(r % s) + 0.5) / s - 0.5) * h_;
                r /= static_cast<std::size_t>(s);
            }
            if (domain_.gauge(y) >= 1.0) continue;
            int best = self;
            if (best < 0) {
                double bd = 0.0;
                for (std::size_t c = 0; c < hood; ++c) {
                    std::array<int, 4> j = idx;
                    std::size_t t = c;
                    bool ok = true;
                    for (int a = 0; a < D; ++a) {
                        j[a] += static_cast<int>(t % 3) - 1;
                        t /= 3;
                        if (j[a] < 0 || j[a] >= N_) ok = false;
                    }
                    if (!ok) continue;
                    int nb = lattice_to_node_[lattice_index(j)];
                    if (nb < 0) continue;
                    double d2 = 0.0;
                    for (int a = 0; a < D; ++a) d2 += (coords_[nb][a] - y[a]) * (coords_[nb][a] - y[a]);
                    if (best < 0 || d2 < bd) {
                        best = nb;
                        bd = d2;
                    }
                }
            }
            if (best >= 0) node_volume_[static_cast<std::size_t>(best)] += sub;
        }
    }
}

std::size_t Grid::lattice_index(const std::array<int, 4>& idx) const {
    std::size_t lin = 0;
    for (int k = 0; k < dim(); ++k) lin = lin * static_cast<std::size_t>(N_) + static_cast<std::size_t>(idx[k]);
    return lin;
}

std::array<int, 4> Grid::lattice_multi(std::size_t lin) const {
    std::array<int, 4> idx{};
    for (int k = dim() - 1; k >= 0; --k) {
        idx[k] = static_cast<int>(lin % static_cast<std::size_t>(N_));
        lin /= static_cast<std::size_t>(N_);
    }
    return idx;
}

Point Grid::lattice_point(const std::array<int, 4>& idx) const {
    Point x{};
    for (int k = 0; k < dim(); ++k) x[k] = -domain_.radius + idx[k] * h_;
    return x;
}

int Grid::nearest_node(const Point& x) const {
    std::array<int, 4> idx{};
    for (int k = 0; k < dim(); ++k) {
        int i = static_cast<int>(std::lround((x[k] + domain_.radius) / h_));
        if (i < 0 || i >= N_) return -1;
        idx[k] = i;
    }
    return lattice_to_node_[lattice_index(idx)];
}

int Grid::step_index(const Offset& o) const {
    for (int k = 0; k < stencil_.size(); ++k)
        if (stencil_.steps[k] == o) return k;
    return -1;
}

StepTable Grid::build_table(std::span<const Offset> steps) const {
    StepTable t;
    t.steps.assign(steps.begin(), steps.end());
    const int S = t.size();
    const int D = dim();
    t.neighbor.assign(size() * S, 0);
    for (std::size_t i = 0; i < size(); ++i) {
        const auto& idx = index_[i];
        for (int k = 0; k < S; ++k) {
            std::array<int, 4> j = idx;
            bool inside_box = true;
            for (int a = 0; a < D; ++a) {
                j[a] += t.steps[k][a];
                if (j[a] < 0 || j[a] >= N_) inside_box = false;
            }
            int nb = inside_box ? lattice_to_node_[lattice_index(j)] : -1;
            if (nb >= 0) {
                t.neighbor[i * S + k] = nb;
                continue;
            }
            Point s{};
            for (int a = 0; a < D; ++a) s[a] = t.steps[k][a] * h_;
            Crossing c;
            c.node = static_cast<int>(i);
            c.step = k;
            c.theta = domain_.boundary_hit(coords_[i], s);
            for (int a = 0; a < D; ++a) c.point[a] = coords_[i][a] + c.theta * s[a];
            t.neighbor[i * S + k] = -static_cast<int>(t.crossings.size()) - 1;
            t.crossings.push_back(c);
        }
    }
    return t;
}

std::vector<char> Grid::exhaustion_mask(int j) const {
    const double r = exhaustion_radius(j);
    std::vector<char> m(size(), 0);
    for (std::size_t i = 0; i < size(); ++i) m[i] = domain_.gauge(coords_[i]) <= r ? 1 : 0;
    return m;
}

std::vector<char> Grid::ball_mask(const Point& center, double r) const {
    std::vector<char> m(size(), 0);
    for (std::size_t i = 0; i < size(); ++i) {
        double d2 = 0.0;
        for (int a = 0; a < dim(); ++a) d2 += (coords_[i][a] - center[a]) * (coords_[i][a] - center[a]);
        m[i] = d2 <= r * r ? 1 : 0;
    }
    return m;
}

std::vector<std::size_t> Grid::ghost_nodes() const {
    std::vector<char> seen(lattice_size(), 0);
    std::vector<std::size_t> out;
    for (const auto& c : stencil_.crossings) {
        std::array<int, 4> j = index_[c.node];
        bool ok = true;
        for (int a = 0; a < dim(); ++a) {
            j[a] += stencil_.steps[c.step][a];
            if (j[a] < 0 || j[a] >= N_) ok = false;
        }
        if (!ok) continue;
        std::size_t lin = lattice_index(j);
        if (!seen[lin]) {
            seen[lin] = 1;
            out.push_back(lin);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace pluri
