#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "pluri/dirichlet.hpp"
#include "pluri/envelope.hpp"
#include "pluri/error.hpp"
#include "pluri/radial.hpp"
#include "pluri/tolerances.hpp"

using namespace pluri;
using namespace th;

namespace {
constexpr double pi = std::numbers::pi;

DirichletProblem problem(MeasureField mu) {
    DirichletProblem p;
    p.boundary = GridFunction::constant(mu.grid, 0.0);
    p.mu = std::move(mu);
    return p;
}

MeasureField delta(GridPtr g, double mass) {
    MeasureField mu = MeasureField::zero(g);
    int node = g->nearest_node(Point{});
    mu.atoms.push_back({node, g->point(static_cast<std::size_t>(node)), mass});
    return mu;
}
}  // namespace

TEST_CASE("zero measure with zero boundary data gives 0") {
    auto g = disc(33);
    GridFunction u = solve_dirichlet(problem(MeasureField::zero(g)));
    for (std::size_t i = 0; i < g->size(); ++i) REQUIRE(std::abs(u.value(i)) < 1e-9);
}

TEST_CASE("a 2 pi Dirac mass gives log|z|") {
    auto g = disc(33);
    SolveReport rep;
    GridFunction u = solve_dirichlet(problem(delta(g, 2 * pi)), &rep);
    REQUIRE(rep.poles.size() == 1);
    CHECK(rep.poles[0].c == doctest::Approx(1.0));
    GridFunction G = build_function(green(), g);
    CHECK(sup_distance(u, G) < 1e-6);

    auto g2 = ball2(9);
    SolveReport rep2;
    solve_dirichlet(problem(delta(g2, 4 * pi * pi)), &rep2);
    REQUIRE(rep2.poles.size() == 1);
    CHECK(rep2.poles[0].c == doctest::Approx(1.0));
}

TEST_CASE("uniform density of total mass 2 pi matches the radial solution") {
    auto g = disc(65);
    MeasureField mu = MeasureField::zero(g);
    double vol = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) vol += g->node_volume(i);
    for (auto& d : mu.density) d = 2 * pi / vol;
    SolveReport rep;
    GridFunction u = solve_dirichlet(problem(mu), &rep);
    CHECK(rep.residual < tol::res(1));
    // Laplacian 2: u = (|z|^2 - 1) / 2
    RadialProfile exact = make_profile([](double s) { return 0.5 * (std::exp(2 * s) - 1.0); });
    CHECK(radial_sup_gap(u, exact) < 5e-3);
    CHECK(ma_measure(u).total_mass() == doctest::Approx(2 * pi).epsilon(0.02));
}

TEST_CASE("solver consistency on seeded random measures") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto g = disc(33);
        ProblemSpec ps;
        ps.seed = seed;
        MeasureField mu = random_measure(g, ps);
        SolveReport rep;
        GridFunction u = solve_dirichlet(problem(mu), &rep);
        CAPTURE(seed);
        CHECK(rep.residual < tol::res(1));
        CHECK(ma_measure(u).total_mass() == doctest::Approx(mu.total_mass()).epsilon(0.02));
        CHECK(u.poles().size() == mu.atoms.size());
    }
}

TEST_CASE("uniqueness: both sweep orders agree") {
    auto g = disc(33);
    ProblemSpec ps;
    ps.seed = 11;
    DirichletProblem a = problem(random_measure(g, ps));
    DirichletProblem b = a;
    b.params.reverse_order = true;
    CHECK(sup_distance(solve_dirichlet(a), solve_dirichlet(b)) < 2 * tol::res(1));
}

TEST_CASE("comparison principle: larger measure gives the smaller solution") {
    auto g = disc(33);
    ProblemSpec ps;
    ps.seed = 5;
    MeasureField mu = random_measure(g, ps);
    GridFunction u = solve_dirichlet(problem(scale_density(mu, 2.0)));
    GridFunction v = solve_dirichlet(problem(mu));
    for (std::size_t i = 0; i < g->size(); ++i)
        if (!u.is_carrier(i)) REQUIRE(u.value(i) <= v.value(i) + tol::comp(1.0));
    // the theorem's direction: MA(v) <= MA(u) and v at least as singular as u
    ComparisonReport r = comparison_check(v, u);
    CHECK(r.hypothesis);
    CHECK(r.conclusion);
}

TEST_CASE("comparison_check examples") {
    auto g = disc(33);
    GridFunction G = build_function(green(), g);
    GridFunction G2 = build_function(green(2.0), g);
    ComparisonReport a = comparison_check(G2, G);
    CHECK_FALSE(a.hypothesis);
    ComparisonReport b = comparison_check(G, G);
    CHECK(b.hypothesis);
    CHECK(b.conclusion);
    CHECK(b.violation == doctest::Approx(0.0));
}

TEST_CASE("mass too concentrated") {
    auto g = disc(17);
    MeasureField mu = MeasureField::zero(g);
    std::size_t c = static_cast<std::size_t>(g->nearest_node(Point{}));
    mu.density[c] = 10.0 * 2 * pi / g->node_volume(c);
    CHECK_THROWS_WITH_AS(solve_dirichlet(problem(mu)), doctest::Contains("mass too concentrated"), Error);
}

TEST_CASE("decompose examples") {
    auto g = disc(33);
    Decomposition a = decompose(build_function(green(), g));
    CHECK(a.ok);
    for (std::size_t i = 0; i < g->size(); ++i) REQUIRE(std::abs(a.u_r.value(i)) < 1e-6);
    CHECK(sup_distance(a.u_s, build_function(green(), g)) < 1e-6);

    GridFunction q = build_function(quad(), g);
    Decomposition b = decompose(q);
    CHECK(b.ok);
    CHECK(b.u_s.bounded());
    CHECK(sup_distance(b.u_r, q) < 5e-3);

    GridFunction u = build_function(sumf({green(), quad()}), g);
    Decomposition c = decompose(u);
    CHECK(c.ok);
    CHECK(c.atoms_match);
    CHECK(c.viol_sum < 1e-6);
    CHECK(sup_distance(c.u_s, build_function(green(), g)) < 1e-6);
    CHECK(sup_distance(c.u_r, q) < 5e-3);
    for (std::size_t i = 0; i < g->size(); ++i)
        if (!u.is_carrier(i)) REQUIRE(c.u_r.value(i) + c.u_s.value(i) <= u.value(i) + 1e-6);
}

TEST_CASE("boundary_values_check examples") {
    auto g = disc(33);
    GridFunction G = build_function(green(), g);
    GridFunction w = build_function(quad(), g);
    BoundaryValuesReport a = boundary_values_check(G, w);
    CHECK_FALSE(a.integral_infinite);
    CHECK(a.integral == doctest::Approx(2 * pi).epsilon(1e-9));
    CHECK(a.verdict);

    GridFunction u = psh_projection(truncate(G, 2.0));
    BoundaryValuesReport b = boundary_values_check(u, GridFunction::constant(g, -1.0));
    CHECK(b.integral == doctest::Approx(ma_measure(u).total_mass()).epsilon(1e-9));
    CHECK(b.verdict);

    BoundaryValuesReport c = boundary_values_check(G, G);
    CHECK(c.integral_infinite);
}

TEST_CASE("random_measure is deterministic for a seed") {
    auto g = disc(17);
    ProblemSpec ps;
    ps.seed = 42;
    MeasureField a = random_measure(g, ps), b = random_measure(g, ps);
    CHECK(a.density == b.density);
    REQUIRE(a.atoms.size() == b.atoms.size());
    for (double d : a.density) CHECK(d >= 0.0);
    for (const auto& at : a.atoms) {
        CHECK(at.mass >= 2 * pi * 0.5 - 1e-12);
        CHECK(at.mass <= 2 * pi * 2.0 + 1e-12);
    }
}
