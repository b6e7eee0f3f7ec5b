#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pluri/catalogue.hpp"
#include "pluri/dirichlet.hpp"
#include "pluri/geodesic.hpp"

namespace pluri {

// One measured quantity of a theorem check.
struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;  // the measured quantity (violation, gap, ...)
    double tol = 0.0;    // pass iff value < tol unless stated otherwise in detail
    std::string detail;
};

struct SuiteReport {
    std::string theorem;
    std::vector<CheckResult> checks;

    bool pass() const;
    // Largest value/tol over the checks (finite tolerances only).
    double worst_ratio() const;
};

struct SuiteConfig {
    Domain domain = make_domain(DomainKind::ball, 1);
    int resolution = 33;
    std::uint64_t seed = 7;
    int count = 10;          // cases (functions, pairs or problems)
    int m = 16;              // geodesic intervals
    EnvelopeOptions envelope;
};

// Seeded N-type functions (zero boundary values, finitely many Green poles):
// sums of 0..2 Green poles with c in [0.5, 1.5] and a bounded E0 part, or
// maxima of two Green functions.
std::vector<FunctionSpec> n_suite(const Domain& d, std::uint64_t seed, int count);

// Designed connectivity pairs on a ball: the first four connectable, the
// last four not.
struct DesignedPair {
    FunctionSpec u0, u1;
    bool connectable = false;
};
std::vector<DesignedPair> designed_pairs();

// Catalogue obstacles (each is the minimum of its list).
std::vector<std::vector<FunctionSpec>> catalogue_obstacles(const Domain& d);

// Theorem tags accepted by verify_theorem.
const std::vector<std::string>& theorem_tags();
// Module invariant each tag is checked through.
std::string theorem_invariant(const std::string& tag);

// Throws InvalidArgument for an unknown tag.
SuiteReport verify_theorem(const std::string& tag, const SuiteConfig& cfg);

// Residual properties on the N-suite: regular mass of g_u below
// 1e-3 (2 pi)^n and identical atom lists.
SuiteReport residual_suite(const SuiteConfig& cfg);

// Radial catalogue functions: grid vs hull-code cross-checks of mass, rooftop
// with a fixed partner and residual.
SuiteReport radial_suite(const SuiteConfig& cfg);
std::vector<FunctionSpec> radial_catalogue();

}  // namespace pluri
