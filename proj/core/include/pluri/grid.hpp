#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pluri/domain.hpp"

namespace pluri {

// Integer lattice offset in the 2n real coordinates.
using Offset = std::array<int, 4>;

// A complex direction of the stencil together with its two lattice steps:
// v (the direction itself) and iv (the direction times i).
struct Direction {
    std::array<std::complex<double>, 2> unit{};  // unit vector in C^n
    Offset v{};
    Offset iv{};
    double length = 1.0;  // |v| in units of h
};

// Where a stencil step leaves the interior before reaching the next node:
// the boundary is hit at x + theta * step.
struct Crossing {
    int node = 0;
    int step = 0;
    double theta = 1.0;
    Point point{};
};

// Neighbor table for a list of lattice steps. neighbor[i*S + k] is the
// interior index of x_i + step_k, or -(c+1) when it crosses the boundary at
// crossing c.
struct StepTable {
    std::vector<Offset> steps;
    std::vector<int> neighbor;
    std::vector<Crossing> crossings;

    int size() const { return static_cast<int>(steps.size()); }
    int at(std::size_t node, int k) const { return neighbor[node * steps.size() + k]; }
};

class Grid {
public:
    // Throws InvalidArgument for resolution < 9.
    static std::shared_ptr<const Grid> make(const Domain& domain, int resolution);

    const Domain& domain() const { return domain_; }
    int n() const { return domain_.n; }
    int dim() const { return 2 * domain_.n; }
    int resolution() const { return N_; }
    double h() const { return h_; }
    double cell_volume() const { return cell_volume_; }
    // Volume of the part of the domain closest to node i; sums to the domain
    // volume, so boundary cells carry their share of the missing layer.
    double node_volume(std::size_t i) const { return node_volume_[i]; }
    std::size_t size() const { return coords_.size(); }
    std::size_t lattice_size() const { return lattice_to_node_.size(); }

    const Point& point(std::size_t i) const { return coords_[i]; }
    std::complex<double> z(std::size_t i, int j) const { return zcoord(coords_[i], j); }
    const std::array<int, 4>& index(std::size_t i) const { return index_[i]; }

    // Row-major lattice index (last real axis fastest) and back.
    std::size_t lattice_index(const std::array<int, 4>& idx) const;
    std::array<int, 4> lattice_multi(std::size_t lin) const;
    Point lattice_point(const std::array<int, 4>& idx) const;
    // Interior index of a lattice node, -1 when it is not interior.
    int node_at(std::size_t lin) const { return lattice_to_node_[lin]; }
    // Interior node nearest to x, -1 when that lattice node is not interior.
    int nearest_node(const Point& x) const;

    const std::vector<Direction>& directions() const { return dirs_; }
    int lines() const { return static_cast<int>(dirs_.size()); }
    // Stencil steps are ordered +v, -v, +iv, -iv for each direction.
    const StepTable& stencil() const { return stencil_; }
    // Stencil step index of an offset, -1 when it is not a stencil step.
    int step_index(const Offset& o) const;

    StepTable build_table(std::span<const Offset> steps) const;

    // Node membership of the closed exhaustion subdomain: gauge <= r_j.
    std::vector<char> exhaustion_mask(int j) const;
    std::vector<char> ball_mask(const Point& center, double r) const;
    // Lattice indices of non-interior nodes reached by some stencil step.
    std::vector<std::size_t> ghost_nodes() const;

private:
    Grid() = default;
    void compute_node_volumes();

    Domain domain_;
    int N_ = 0;
    double h_ = 0.0;
    double cell_volume_ = 0.0;
    std::vector<int> lattice_to_node_;
    std::vector<std::array<int, 4>> index_;
    std::vector<Point> coords_;
    std::vector<double> node_volume_;
    std::vector<Direction> dirs_;
    StepTable stencil_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(const Domain& domain, int resolution) { return Grid::make(domain, resolution); }

}  // namespace pluri
