#pragma once

#include <memory>
#include <vector>

#include "pluri/grid.hpp"
#include "pluri/pole.hpp"

namespace pluri {

// The singular part sum_j c_j G(., p_j) of a grid function, evaluated once on
// the nodes and on the boundary crossings of the stencil.
class Skeleton {
public:
    Skeleton(GridPtr grid, std::vector<PoleSpec> poles);

    const Grid& grid() const { return *grid_; }
    const std::vector<PoleSpec>& poles() const { return poles_; }
    bool empty() const { return poles_.empty(); }

    // S(x_i); -inf on carrier nodes.
    const std::vector<double>& node_values() const { return node_; }
    // S at the boundary crossings of the stencil (may be -inf on a divisor).
    const std::vector<double>& crossing_values() const { return cross_; }
    const std::vector<char>& carrier() const { return carrier_; }
    // Second difference of S along each stencil line, i.e. 4|v|^2 times the
    // Levi form, indexed node*lines + line. Zero on carrier nodes.
    const std::vector<double>& line_curvature() const { return sigma_; }

private:
    GridPtr grid_;
    std::vector<PoleSpec> poles_;
    std::vector<double> node_, cross_, sigma_;
    std::vector<char> carrier_;
};

using SkeletonPtr = std::shared_ptr<const Skeleton>;

SkeletonPtr make_skeleton(GridPtr grid, std::vector<PoleSpec> poles);

// A candidate psh function on a grid: finite background values at interior
// nodes and at the boundary crossings, plus a pole skeleton. The value at a
// node is background + S, which is -inf exactly on the pole carriers.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(GridPtr grid, std::vector<double> background, std::vector<double> boundary, SkeletonPtr skeleton);
    GridFunction(GridPtr grid, std::vector<double> background, std::vector<double> boundary,
                 std::vector<PoleSpec> poles = {});

    static GridFunction constant(GridPtr grid, double c);

    bool valid() const { return static_cast<bool>(grid_); }
    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const SkeletonPtr& skeleton() const { return skel_; }
    const std::vector<PoleSpec>& poles() const { return skel_->poles(); }
    bool bounded() const { return skel_->empty(); }
    std::size_t size() const { return bg_.size(); }

    const std::vector<double>& background() const { return bg_; }
    const std::vector<double>& boundary_background() const { return bd_; }

    double value(std::size_t i) const { return bg_[i] + skel_->node_values()[i]; }
    double boundary_value(std::size_t c) const { return bd_[c] + skel_->crossing_values()[c]; }
    bool is_carrier(std::size_t i) const { return skel_->carrier()[i] != 0; }
    std::vector<double> values() const;
    std::vector<double> boundary_values() const;

    // max |background| over nodes and crossings; the data scale for tolerances.
    double scale() const;

    GridFunction with_background(std::vector<double> background, std::vector<double> boundary) const;

private:
    GridPtr grid_;
    std::vector<double> bg_, bd_;
    SkeletonPtr skel_;
};

void require_same_grid(const GridFunction& a, const GridFunction& b);

// sup over nodes of |u - v| where both are finite, +inf when the pole sets
// differ; optional node mask.
double sup_distance(const GridFunction& u, const GridFunction& v, const std::vector<char>* mask = nullptr);
// max over nodes of (u - v), pole conventions as in sup_distance.
double sup_excess(const GridFunction& u, const GridFunction& v, const std::vector<char>* mask = nullptr);

}  // namespace pluri
