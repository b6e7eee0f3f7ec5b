#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pluri/grid_function.hpp"

namespace pluri {

// Obstacle for the envelope, stored relative to a pole skeleton S:
//   h(x) = S(x) + values[x],  boundary data = S(q) + boundary[q].
// values == +inf means no constraint at that node. The envelope inherits the
// skeleton, so the constraint is waived exactly on the pole carriers.
struct Obstacle {
    GridPtr grid;
    std::vector<PoleSpec> poles;
    std::vector<double> values;
    std::vector<double> boundary;

    // h = +inf everywhere (only the 0 ceiling), boundary data 0.
    static Obstacle unconstrained(GridPtr grid);
    // h = min_k (u_k + shift_k); poles merged with the larger coefficient.
    static Obstacle min_of(const std::vector<std::pair<const GridFunction*, double>>& terms);
    static Obstacle from(const GridFunction& u, double shift = 0.0) { return min_of({{&u, shift}}); }

    // Replaces boundary data by that of b (relative to this obstacle's skeleton).
    Obstacle& with_boundary(const GridFunction& b);
    // Drops the constraint outside mask.
    Obstacle& restrict_to(const std::vector<char>& mask);

    double data_scale() const;
};

struct EnvelopeOptions {
    double tol = 0.0;          // 0: tol_env of the data
    double stop_factor = 0.02;  // sweep stops when sup-change < stop_factor * tol
    double omega = 0.0;        // 0: automatic over-relaxation
    int max_sweeps = 100000;
    const GridFunction* warm_start = nullptr;  // any psh minorant of the answer
};

struct EnvelopeStats {
    int sweeps = 0;
    double last_change = 0.0;
    double tol = 0.0;
};

GridFunction envelope(const Obstacle& h, const EnvelopeOptions& opt = {}, EnvelopeStats* stats = nullptr);
GridFunction envelope(Obstacle h, const GridFunction& boundary, const EnvelopeOptions& opt = {},
                      EnvelopeStats* stats = nullptr);

// Largest discretely psh minorant of u (u itself when u is discretely psh).
GridFunction psh_projection(const GridFunction& u, const EnvelopeOptions& opt = {});

GridFunction rooftop(const GridFunction& u, const GridFunction& v, const EnvelopeOptions& opt = {});

struct AsymptoticReport {
    std::vector<double> C;
    std::vector<double> change;  // sup |P_C - P_{C/2}|
    double worst_decrease = 0.0; // max over nodes of P_{C/2} - P_C (should be <= tol)
    bool stabilized = false;
    double tol = 0.0;
};

// P[u](v) = lim_C P(u + C, v), C = 1, 2, 4, ..., 2^10.
GridFunction asymptotic_rooftop(const GridFunction& u, const GridFunction& v, const EnvelopeOptions& opt = {},
                                AsymptoticReport* report = nullptr);

// g_u = P[u](0)
GridFunction residual(const GridFunction& u, const EnvelopeOptions& opt = {}, AsymptoticReport* report = nullptr);

// u^j: largest psh function below u off the closed subdomain of level j.
GridFunction balayage(const GridFunction& u, int j, const EnvelopeOptions& opt = {});

struct MajorantReport {
    std::vector<int> levels;
    std::vector<double> change;
    int final_level = 0;
};

GridFunction smallest_maximal_majorant(const GridFunction& u, const EnvelopeOptions& opt = {},
                                       MajorantReport* report = nullptr);

enum class CegrellClass { E0, F, N, NH };

const char* to_string(CegrellClass c);

struct ClassVerdict {
    bool verdict = false;
    std::string reason;
    std::optional<GridFunction> witness;
    double measure = 0.0;  // the quantity the verdict hinges on
};

ClassVerdict class_membership(const GridFunction& u, CegrellClass cls, const GridFunction* H = nullptr,
                              const EnvelopeOptions& opt = {});

// Data scale of one or two functions, for tol_env.
double data_scale(const GridFunction& u);
double data_scale(const GridFunction& u, const GridFunction& v);

}  // namespace pluri
