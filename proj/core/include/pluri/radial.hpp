#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pluri/grid_function.hpp"

namespace pluri {

// Radial function u(z) = phi(log(|z|/R)) on a ball, sampled on a uniform grid
// in s over [s_min, 0]. Left of s_min the profile continues with slope nu,
// the Lelong coefficient at the origin.
struct RadialProfile {
    static constexpr int kSamples = 1025;
    static constexpr int kSlopeSamples = 32;
    static constexpr double kSMin = -8.0;

    double s_min = kSMin;
    double ds = -kSMin / (kSamples - 1);
    std::vector<double> phi;
    double nu = 0.0;

    int size() const { return static_cast<int>(phi.size()); }
    double s(int k) const { return s_min + ds * k; }
    // Piecewise-linear interpolation; linear with slope nu left of s_min.
    double value(double s) const;
    // Left derivative at s (nu left of the first segment).
    double left_slope(double s) const;
    double boundary_value() const { return phi.back(); }
};

// Samples f on the standard s-grid; nu is the slope over the leftmost
// kSlopeSamples samples, rounded to a multiple of 1e-6.
RadialProfile make_profile(const std::function<double(double)>& f);
RadialProfile profile_from_samples(std::vector<double> phi);

struct ProfileCheck {
    bool verdict = true;
    double worst_convexity = 0.0;  // most negative second difference
    double worst_monotonicity = 0.0;  // most negative first difference
    double slope_gap = 0.0;  // |first segment slope - nu|
};

ProfileCheck check_profile(const RadialProfile& p, double tol);

// u(z) = phi(log(|z|/R)) with a Green pole of coefficient nu at 0 when nu > 0.
// Throws InvalidArgument unless the grid is over a ball.
GridFunction radial_to_grid(const RadialProfile& p, GridPtr grid);

// Total MA mass of {|z| <= rR}: (2 pi phi'(log r^-))^n.
double radial_ma_mass(const RadialProfile& p, double r, int n);
double radial_atom_mass(const RadialProfile& p, int n);

// Largest convex nondecreasing minorant of the obstacle on the half-line
// s <= 0, with the samples continued by slope nu left of s_min.
RadialProfile radial_envelope(const RadialProfile& obstacle);
RadialProfile radial_min(const RadialProfile& a, const RadialProfile& b);
RadialProfile radial_rooftop(const RadialProfile& a, const RadialProfile& b);

struct RadialResidualReport {
    std::vector<double> C;
    std::vector<double> change;
    bool stabilized = false;
};

// lim_C envelope(min(phi + C, 0)) over C = 1, 2, ..., 2^10. Throws
// ConvergenceError when consecutive results never agree within tol.
RadialProfile radial_residual(const RadialProfile& p, double tol = 1e-12, RadialResidualReport* report = nullptr);

// Slice t of the geodesic between two convex nondecreasing profiles:
// the Legendre transform of (1 - t) phi0* + t phi1*.
RadialProfile radial_geodesic(const RadialProfile& p0, const RadialProfile& p1, double t);

// Legendre transform on slopes lam >= nu (exact for the piecewise-linear
// interpolant; +inf below nu).
double legendre(const RadialProfile& p, double lam);

double profile_sup_distance(const RadialProfile& a, const RadialProfile& b);

// sup over nodes in mask (all non-carrier nodes when null) of
// |u(x) - phi(log(|x|/R))|.
double radial_sup_gap(const GridFunction& u, const RadialProfile& p, const std::vector<char>* mask = nullptr);

void write_profile_csv(std::ostream& os, const RadialProfile& p);
RadialProfile read_profile_csv(std::istream& is);

}  // namespace pluri
