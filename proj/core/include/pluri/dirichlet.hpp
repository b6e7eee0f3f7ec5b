#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pluri/psh.hpp"

namespace pluri {

struct SolverParams {
    double tol_res = 0.0;    // 0: 1e-4 (2 pi)^n
    double tol_change = 0.0; // sweep stops when sup-change < tol_change (0: 1e-8 (2 pi)^n)
    int max_sweeps = 100000;
    bool reverse_order = false;  // sweep in reverse node order (uniqueness proxy)
    double omega = 0.0;          // 0: automatic over-relaxation
};

// (dd^c u)^n = mu with boundary values H, mu a bounded density plus atoms.
struct DirichletProblem {
    MeasureField mu;
    GridFunction boundary;  // H: pole-free, only its boundary values are used
    SolverParams params;
};

struct SolveReport {
    int sweeps = 0;
    double residual = 0.0;  // max over nodes |cell mass - target|
    double total_target = 0.0;
    double total_mass = 0.0;  // regular mass of the solution under the solver scheme
    std::vector<PoleSpec> poles;
};

// Atoms become Green poles c = mass^{1/n} / 2 pi; the bounded remainder is
// found by nonlinear Gauss-Seidel on the local clamped-determinant scheme.
GridFunction solve_dirichlet(const DirichletProblem& prob, SolveReport* report = nullptr);

// Nodal regular masses under the solver's own scheme (local determinant).
std::vector<double> scheme_masses(const GridFunction& u);

struct Decomposition {
    GridFunction u_r, u_s;
    bool ok = false;
    // Worst violations of u <= u_r, u <= u_s and u_r + u_s <= u.
    double viol_r = 0.0, viol_s = 0.0, viol_sum = 0.0;
    int worst_node = -1;
    // Measure matches: max cell difference and atom-list agreement.
    double regular_match = 0.0;
    bool atoms_match = false;
    std::string message;
};

Decomposition decompose(const GridFunction& u, double tol = 0.0, const SolverParams& params = {});

struct ComparisonReport {
    bool hypothesis = false;    // MA(u) <= MA(v) cell-wise and atom-wise
    double hypothesis_gap = 0.0;  // worst MA(u) - MA(v)
    bool singularity_order = false;  // u at least as singular as v
    double violation = 0.0;     // max(0, sup(v - u)) when the hypothesis holds
    bool conclusion = false;
    std::string message;
};

ComparisonReport comparison_check(const GridFunction& u, const GridFunction& v, double tol_comp = 0.0);

struct BoundaryValuesReport {
    double integral = 0.0;
    bool integral_infinite = false;
    bool verdict = false;
    std::string reason;
};

BoundaryValuesReport boundary_values_check(const GridFunction& u, const GridFunction& w);

// Seeded random test problems: smooth densities from a few Fourier modes
// clamped at zero, plus 0..2 Green atoms with c in [0.5, 2].
struct ProblemSpec {
    std::uint64_t seed = 1;
    int modes = 3;
    double density_mass = 0.5;  // fraction of (2 pi)^n put into the density
    int min_atoms = 0;
    int max_atoms = 2;
};

MeasureField random_measure(GridPtr grid, const ProblemSpec& spec);
// mu scaled by s in its density (atoms unchanged).
MeasureField scale_density(const MeasureField& mu, double s);

}  // namespace pluri
