#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pluri/grid_function.hpp"

namespace pluri {

struct Atom {
    int node = -1;
    Point location{};
    double mass = 0.0;
};

// Positive measure: density per interior node (mass = density * node volume) plus
// finitely many atoms.
struct MeasureField {
    GridPtr grid;
    std::vector<double> density;
    std::vector<Atom> atoms;

    static MeasureField zero(GridPtr g);

    double cell_mass(std::size_t i) const { return density[i] * grid->node_volume(i); }
    double regular_mass(const std::vector<char>* mask = nullptr) const;
    double singular_mass() const;
    double total_mass() const { return regular_mass() + singular_mass(); }
};

// max(u, -t): bounded, no poles.
GridFunction truncate(const GridFunction& u, double t);

struct PshReport {
    bool verdict = true;
    double worst = 0.0;  // most negative line excess (0 if none negative)
    int node = -1;
    int line = -1;
    // Fraction of nodes whose normalized excess is below -0.25.
    double bad_fraction = 0.0;
};

// Discrete psh test: every 4-point complex-line second difference, corrected
// by the skeleton's own curvature, is >= -tol.
PshReport is_psh(const GridFunction& u, double tol);

struct MaOptions {
    // Reject input when more than this fraction of nodes fails the cone test
    // by a normalized margin of 0.25.
    double psh_gate = 0.01;
    // Conservative (divergence form) assembly for bounded n=2 input.
    bool conservative = true;
};

// Discrete Monge-Ampere measure 4^n n! det(H_C) with atoms (2 pi c)^n at point
// poles. Throws DomainError for non-psh input or hyperplane poles.
MeasureField ma_measure(const GridFunction& u, const MaOptions& opt = {});

// Nodal masses before positivity repair (diagnostics and tests).
std::vector<double> ma_raw_masses(const GridFunction& u, bool conservative = true);

struct RegularPartReport {
    std::vector<double> t_levels;
    std::vector<double> masses;
    bool stable = false;
};

MeasureField regular_part(const GridFunction& u, RegularPartReport* report = nullptr, const MaOptions& opt = {});

struct SingularEstimate {
    Atom atom;
    double estimate = 0.0;
    double relative_gap = 0.0;
    double radius = 0.0;
};

struct SingularPartReport {
    std::vector<SingularEstimate> poles;
    double worst_gap = 0.0;
};

// Atoms (p_j, (2 pi c_j)^n). When `report` is given the shrinking-ball estimate
// is computed too and DomainError("non-Green-type singularity") is thrown if a
// gap exceeds `gap_tol`.
MeasureField singular_part(const GridFunction& u, SingularPartReport* report = nullptr, double gap_tol = 0.10);

struct SingularityComparison {
    bool u_more_singular = false;  // u is at least as singular as v
    double C_K = 0.0;              // +inf when not
};

SingularityComparison compare_singularities(const GridFunction& u, const GridFunction& v, int K);

// Capacity of a node set via the relative extremal function.
double capacity(GridPtr grid, const std::vector<char>& E, GridFunction* extremal = nullptr);

double cap_distance(const GridFunction& u, const GridFunction& v, double eps, int K);

// Cells of the stencil closure of a pole (the pole node and its neighbors).
std::vector<char> carrier_closure(const GridFunction& u);

}  // namespace pluri
