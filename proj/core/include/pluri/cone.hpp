#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pluri/grid_function.hpp"

namespace pluri {

// Linearized complex-line constraints about one grid function's skeleton.
// For node i and stencil line l the constraint on the background w reads
//
//   sum_{k interior} w(nb_k) + cst(i,l) - den(i,l) * w(i) >= 0,
//
// where boundary crossings are folded into den/cst by linear extrapolation
// towards the boundary point and cst also carries the skeleton's own second
// difference. den == 0 marks a line with an unconstrained boundary end.
struct LineSystem {
    int lines = 0;
    std::vector<int> nb;  // ((i*lines + l)*4 + k), -1 for crossings
    std::vector<double> den;
    std::vector<double> cst;

    std::size_t slot(std::size_t i, int l) const { return i * static_cast<std::size_t>(lines) + static_cast<std::size_t>(l); }

    // Second difference of w plus skeleton term along line l at node i.
    double excess(std::span<const double> w, std::size_t i, int l) const {
        std::size_t s = slot(i, l);
        if (den[s] == 0.0) return 0.0;
        const int* p = &nb[s * 4];
        double sum = cst[s] - den[s] * w[i];
        for (int k = 0; k < 4; ++k)
            if (p[k] >= 0) sum += w[static_cast<std::size_t>(p[k])];
        return sum;
    }

    // Largest value of w(i) satisfying every line constraint at i.
    double bound(std::span<const double> w, std::size_t i) const;
};

LineSystem build_line_system(const Grid& g, const Skeleton& skel, std::span<const double> boundary_background);

// Value of w at the end of stencil step k from node i, extrapolating to the
// boundary crossing when the step leaves the interior.
double step_value(const Grid& g, std::span<const double> w, std::span<const double> bd, std::size_t i, int k);

}  // namespace pluri
