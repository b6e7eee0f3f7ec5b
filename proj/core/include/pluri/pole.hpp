#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "pluri/grid.hpp"

namespace pluri {

enum class PoleModel {
    green,       // Green function of the domain with a point pole
    hyperplane,  // log|z_k - a|/R along the complex hyperplane {z_k = a}
};

// One logarithmic singularity c * G(., p). The location is snapped to a grid
// node when the pole is made, so every pole set is a finite node set.
struct PoleSpec {
    PoleModel model = PoleModel::green;
    Point location{};
    int node = -1;  // interior node of a point pole
    int axis = 0;   // complex coordinate of a hyperplane pole
    double c = 1.0;

    // Same singular carrier (coefficient ignored).
    bool same_carrier(const PoleSpec& o) const;
};

PoleSpec make_green_pole(const Grid& g, const Point& p, double c);
PoleSpec make_hyperplane_pole(const Grid& g, int axis, std::complex<double> a, double c);

// Model function (coefficient 1). Returns -inf on the carrier.
double pole_model_value(const Domain& d, const PoleSpec& p, const Point& x);

// Levi form of the model function at x in the complex direction xi:
// sum_{jk} G_{z_j zbar_k} xi_j conj(xi_k). Only valid off the carrier; zero
// for models that are pluriharmonic there.
double pole_levi_form(const Domain& d, const PoleSpec& p, const Point& x,
                      const std::array<std::complex<double>, 2>& xi);

// True when the model's Levi form does not capture its full dd^c off the
// carrier (polydisc Green functions have kinks), so callers should use
// sampled second differences instead.
bool pole_has_kinks(const Domain& d, const PoleSpec& p);

bool on_carrier(const Grid& g, const PoleSpec& p, std::size_t node);

// Union of two pole lists keeping the larger coefficient per carrier.
std::vector<PoleSpec> merge_max(const std::vector<PoleSpec>& a, const std::vector<PoleSpec>& b);
// Carriers present in both lists with the smaller coefficient.
std::vector<PoleSpec> merge_min(const std::vector<PoleSpec>& a, const std::vector<PoleSpec>& b);
// Union adding coefficients (pole list of a sum).
std::vector<PoleSpec> merge_sum(const std::vector<PoleSpec>& a, const std::vector<PoleSpec>& b);
std::vector<PoleSpec> scale_poles(const std::vector<PoleSpec>& a, double s);
// Coefficient of carrier p in list a, 0 when absent.
double coefficient_of(const std::vector<PoleSpec>& a, const PoleSpec& p);
// Canonical order (by model, axis, node) so equal pole sets compare equal.
void sort_poles(std::vector<PoleSpec>& a);

std::string describe(const PoleSpec& p);

}  // namespace pluri
