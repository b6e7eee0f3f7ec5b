#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

// Default tolerances. Every check in the library derives its slack from here.
namespace pluri::tol {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Relative envelope tolerance; the data scale is floored at 1 so an all-zero
// obstacle still gets a usable absolute tolerance.
inline double env(double data_scale) { return 1e-6 * std::max(1.0, data_scale); }

inline double mass(int n) { return 1e-3 * std::pow(two_pi, n); }
inline double res(int n) { return 1e-4 * std::pow(two_pi, n); }

inline constexpr double class_factor = 10.0;
inline constexpr double comp_factor = 10.0;
inline constexpr double contact_factor = 10.0;

inline double class_tol(double data_scale) { return class_factor * env(data_scale); }
inline double comp(double data_scale) { return comp_factor * env(data_scale); }
inline double contact(double data_scale) { return contact_factor * env(data_scale); }

inline constexpr int max_sweeps = 100000;

}  // namespace pluri::tol
