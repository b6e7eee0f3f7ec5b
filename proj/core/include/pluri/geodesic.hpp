#pragma once

#include <string>
#include <vector>

#include "pluri/envelope.hpp"

namespace pluri {

// Discrete lift over Omega x [0,1]: slices k = 0..m at t_k = k/m. Interior
// slices share one pole skeleton (the larger coefficient of the endpoints at
// every carrier) and store their background in `slices`; the end slices are
// the endpoint data.
struct GeodesicField {
    GridPtr grid;
    int m = 0;
    std::vector<double> t;
    SkeletonPtr skeleton;
    std::vector<std::vector<double>> slices;  // background of interior slices, index 1..m-1
    GridFunction u0, u1;
    bool pole_mismatch = false;
    int sweeps = 0;

    // Endpoint and interior slices as grid functions.
    GridFunction slice(int k) const;
    double value(std::size_t i, int k) const;
};

// V(x, t) = (1 - t) u0 + t u1 on all slices (no iteration).
GeodesicField linear_lift(const GridFunction& u0, const GridFunction& u1, int m = 16);
// Lift with prescribed interior slices f(t_k); the end slices of f are
// replaced by u0 and u1.
GeodesicField lift_of(const std::vector<GridFunction>& slices);

struct LiftCheck {
    bool verdict = true;
    double worst = 0.0;
    int node = -1, slice = -1, line = -1;
};

// Every complex-line second difference of the lifted stencil (x-lines, the
// t-line and mixed (x, t) lines) is >= -tol at interior slices.
// With `centered`, the centered lifted complex Hessian must also be PSD up
// to tol (measured as the smallest eigenvalue times the t step squared).
LiftCheck lift_check(const GeodesicField& V, double tol, bool centered = false);

// Largest discretely psh lift below the linear interpolant with the given
// end slices. The default scheme is monotone (line differences only). The
// centered option adds the Hessian condition: more accurate for endpoints
// joined by a smooth geodesic, unreliable when the endpoints do not connect.
GeodesicField largest_geodesic(const GridFunction& u0, const GridFunction& u1, int m = 16,
                               const EnvelopeOptions& opt = {}, bool centered = false);

struct EndpointLimit {
    GridFunction limit;
    double gap = 0.0;  // sup over the closed level-2 subdomain, off carriers
};

// Linear extrapolation of the first two interior slices towards the chosen
// end: 2 V(t_1) - V(t_2) (or the mirror image at t = 1).
EndpointLimit endpoint_limit(const GeodesicField& V, int end);

struct ConnectivityReport {
    bool verdict_endpoint = false;
    bool verdict_darvas = false;
    bool verdict_residual = false;
    bool agree = false;
    double gap0 = 0.0, gap1 = 0.0;
    double darvas01 = 0.0, darvas10 = 0.0;  // sup|P[u0](u1) - u1|, sup|P[u1](u0) - u0|
    double resid01 = 0.0, resid10 = 0.0;    // max(u0 - g_u1), max(u1 - g_u0)
    double tol = 0.0, gap_tol = 0.0;
    double projection0 = 0.0, projection1 = 0.0;  // sup|P(u_k) - u_k| of the inputs
    bool pole_mismatch = false;
};

struct ConnectivityOptions {
    int m = 16;
    double gap_factor = 10.0;  // gap tolerance = gap_factor * tol_env
    bool centered = false;
    EnvelopeOptions envelope;
};

// Runs all three criteria on the discrete psh projections of u0 and u1.
ConnectivityReport connectivity_test(const GridFunction& u0, const GridFunction& u1,
                                     const ConnectivityOptions& opt = {});

}  // namespace pluri
