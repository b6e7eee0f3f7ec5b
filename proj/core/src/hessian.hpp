#pragma once

#include <complex>
#include <span>

#include "pluri/grid_function.hpp"

namespace pluri::detail {

// Stencil indices needed for the centered complex Hessian in C^2.
struct HessianStencil {
    int ax[4][2];   // +e_a, -e_a
    int mix[4][4];  // pairs (x1x2, y1y2, x1y2, y1x2): ++, --, +-, -+
};

// Complex Hessian [[a, b], [conj(b), d]].
struct Hess {
    double a = 0, d = 0;
    std::complex<double> b{0, 0};
};

HessianStencil hessian_stencil(const Grid& g);
Hess centered_hessian(const Grid& g, const HessianStencil& hs, std::span<const double> w, std::span<const double> bd,
                      std::size_t i);
// Hessian of the pole skeleton rebuilt from its line curvatures.
Hess skeleton_hessian(const Grid& g, const Skeleton& skel, std::size_t i);
double clamped_det(const Hess& H);

}  // namespace pluri::detail
