#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "pluri/envelope.hpp"
#include "pluri/error.hpp"
#include "pluri/psh.hpp"
#include "pluri/radial.hpp"
#include "pluri/tolerances.hpp"

using namespace pluri;
using namespace th;

namespace {
constexpr double pi = std::numbers::pi;

GridFunction harmonic_x(GridPtr g) {
    return sampled(g, [](const Point& x) { return 0.5 * x[0] - 0.5; });
}
}  // namespace

TEST_CASE("envelope of a psh obstacle is the obstacle") {
    auto g = disc(33);
    GridFunction q = build_function(quad(), g);
    GridFunction P = envelope(Obstacle::from(q));
    CHECK(sup_distance(P, q) < 2 * tol::env(1.0));
    GridFunction G = build_function(green(), g);
    CHECK(sup_distance(envelope(Obstacle::from(G)), G) < 2 * tol::env(1.0));
}

TEST_CASE("unconstrained envelope with zero boundary data is 0") {
    auto g = disc(17);
    GridFunction P = envelope(Obstacle::unconstrained(g));
    for (std::size_t i = 0; i < g->size(); ++i) REQUIRE(std::abs(P.value(i)) < tol::env(1.0));
}

TEST_CASE("relative extremal function of the half disc") {
    auto g = disc(65);
    auto E = g->ball_mask(Point{}, 0.5);
    Obstacle h = Obstacle::unconstrained(g);
    for (std::size_t i = 0; i < g->size(); ++i)
        if (E[i]) h.values[i] = -1.0;
    GridFunction P = envelope(h);
    double worst = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        double r = radius_of(*g, i);
        double exact = r > 0 ? std::max(-1.0, std::log(r) / std::log(2.0)) : -1.0;
        worst = std::max(worst, std::abs(P.value(i) - exact));
    }
    // first order: the discrete set E is the node set inside |z| <= 1/2
    CHECK(worst < 0.06);
    CHECK(is_psh(P, tol::class_tol(1.0)).verdict);
}

TEST_CASE("envelope is order preserving in the obstacle") {
    auto g = disc(33);
    GridFunction a = build_function(maxf({green(), cst(-2.0)}), g);
    GridFunction b = shifted(a, -0.3);
    GridFunction Pa = envelope(Obstacle::from(a));
    GridFunction Pb = envelope(Obstacle::from(b));
    for (std::size_t i = 0; i < g->size(); ++i) REQUIRE(Pb.value(i) <= Pa.value(i) + tol::env(2.0));
}

TEST_CASE("envelope stays below the obstacle and meets the contact property") {
    auto g = disc(65);
    GridFunction a = build_function(sumf({green(0.5, {0.3, 0, 0, 0}), quad()}), g);
    GridFunction b = build_function(maxf({green(1.0, {-0.3, 0.1, 0, 0}), cst(-1.5)}), g);
    Obstacle h = Obstacle::min_of({{&a, 0.0}, {&b, 0.0}});
    GridFunction P = envelope(h);
    double tol_env = tol::env(data_scale(a, b));
    MeasureField mu = regular_part(P);
    double off = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        if (P.is_carrier(i)) continue;
        double hi = std::min(a.value(i), b.value(i));
        REQUIRE(P.value(i) <= hi + tol_env);
        if (P.value(i) < hi - tol::contact(data_scale(a, b))) off += mu.cell_mass(i);
    }
    CHECK(off < tol::mass(1));
}

TEST_CASE("rooftop identities") {
    auto g = disc(33);
    GridFunction u = build_function(sumf({green(0.5), quad()}), g);
    CHECK(sup_distance(rooftop(u, u), u) < 2 * tol::env(data_scale(u)));
    GridFunction zero = GridFunction::constant(g, 0.0);
    CHECK(sup_distance(rooftop(zero, u), u) < 2 * tol::env(data_scale(u)));
}

TEST_CASE("rooftop of two shifted logarithms carries both atoms") {
    auto g = disc(65);
    GridFunction a = build_function(green(1.0, {0.4, 0, 0, 0}), g);
    GridFunction b = build_function(green(1.0, {-0.4, 0, 0, 0}), g);
    GridFunction P = rooftop(a, b);
    MeasureField s = singular_part(P);
    REQUIRE(s.atoms.size() == 2);
    for (const auto& at : s.atoms) {
        CHECK(at.mass == doctest::Approx(2 * pi));
        CHECK(std::abs(std::abs(at.location[0]) - 0.4) < g->h());
    }
    for (std::size_t i = 0; i < g->size(); ++i)
        if (!P.is_carrier(i)) REQUIRE(P.value(i) <= std::min(a.value(i), b.value(i)) + 1e-9);
}

TEST_CASE("asymptotic rooftop examples") {
    auto g = disc(33);
    GridFunction zero = GridFunction::constant(g, 0.0);
    GridFunction q = build_function(quad(), g);
    CHECK(sup_distance(asymptotic_rooftop(q, zero), zero) < 2 * tol::env(1.0));
    GridFunction G = build_function(green(), g);
    AsymptoticReport rep;
    GridFunction A = asymptotic_rooftop(G, zero, {}, &rep);
    CHECK(rep.stabilized);
    CHECK(rep.worst_decrease <= rep.tol);
    CHECK(sup_distance(A, G) < 2 * tol::env(1.0));
    GridFunction u = build_function(sumf({green(0.5), quad()}), g);
    CHECK(sup_distance(asymptotic_rooftop(u, u), u) < 2 * tol::env(data_scale(u)));
}

TEST_CASE("residual examples") {
    auto g = disc(33);
    GridFunction q = build_function(quad(), g);
    GridFunction gq = residual(q);
    for (std::size_t i = 0; i < g->size(); ++i) REQUIRE(std::abs(gq.value(i)) < 2 * tol::env(1.0));
    for (double c : {0.5, 2.0}) {
        GridFunction G = build_function(green(c), g);
        CHECK(sup_distance(residual(G), G) < 2 * tol::env(1.0));
    }
}

TEST_CASE("residual kills regular mass and keeps the atoms") {
    auto g = disc(65);
    GridFunction u = build_function(sumf({green(0.7, {0.2, 0.1, 0, 0}), maxf({green(0.5, {-0.3, 0, 0, 0}), cst(-1.0)}), quad()}), g);
    GridFunction gu = residual(u);
    CHECK(regular_part(gu).total_mass() < tol::mass(1));
    MeasureField a = singular_part(u), b = singular_part(gu);
    REQUIRE(a.atoms.size() == b.atoms.size());
    for (std::size_t k = 0; k < a.atoms.size(); ++k) {
        CHECK(a.atoms[k].node == b.atoms[k].node);
        CHECK(a.atoms[k].mass == b.atoms[k].mass);
    }
    // idempotency
    CHECK(sup_distance(residual(gu), gu) < 2 * tol::env(data_scale(gu)));
}

TEST_CASE("residual of log|z_1| on the unit ball of C^2") {
    auto g = ball2(13);
    GridFunction gu = residual(build_function(logcoord(0), g));
    auto mask = g->exhaustion_mask(2);
    double worst = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        if (!mask[i] || gu.is_carrier(i)) continue;
        const Point& x = g->point(i);
        double exact = std::log(std::hypot(x[0], x[1])) - 0.5 * std::log(1.0 - x[2] * x[2] - x[3] * x[3]);
        worst = std::max(worst, std::abs(gu.value(i) - exact));
    }
    CHECK(worst < 0.05);
}

TEST_CASE("balayage examples") {
    auto g = disc(65);
    GridFunction zero = GridFunction::constant(g, 0.0);
    CHECK(sup_distance(balayage(zero, 1), zero) < tol::env(1.0));
    // The constraint holds off the level-1 subdomain {|z| <= 1/2}, so u^1 is
    // the largest psh function agreeing with u near the boundary.
    GridFunction G = build_function(green(), g);
    GridFunction bG = balayage(G, 1);
    CHECK(bG.bounded());
    RadialProfile pG = make_profile([](double s) { return std::max(s, std::log(0.5)); });
    CHECK(radial_sup_gap(bG, pG) < 0.04);  // first order at the kink |z| = 1/2
    CHECK_THROWS_AS(balayage(G, 0), InvalidArgument);

    GridFunction q = build_function(quad(), g);
    GridFunction b = balayage(q, 1);
    RadialProfile pq = make_profile([](double s) { return std::max(std::exp(2 * s) - 1, -0.75); });
    CHECK(radial_sup_gap(b, pq) < 0.02);
    for (std::size_t i = 0; i < g->size(); ++i) REQUIRE(b.value(i) >= q.value(i) - tol::env(1.0));
    // u^j increases with j: the constrained shell shrinks
    GridFunction b3 = balayage(q, 3);
    for (std::size_t i = 0; i < g->size(); ++i) REQUIRE(b3.value(i) >= b.value(i) - tol::env(1.0));
}

TEST_CASE("smallest maximal majorant") {
    auto g = disc(33);
    GridFunction G = build_function(green(), g);
    MajorantReport rep;
    GridFunction t = smallest_maximal_majorant(G, {}, &rep);
    for (std::size_t i = 0; i < g->size(); ++i) REQUIRE(std::abs(t.value(i)) < tol::class_tol(1.0));
    CHECK(rep.final_level >= 1);
    GridFunction H = harmonic_x(g);
    CHECK(sup_distance(smallest_maximal_majorant(H), H) < tol::class_tol(1.0));
}

TEST_CASE("class membership") {
    auto g = disc(33);
    GridFunction G = build_function(green(), g);
    ClassVerdict f = class_membership(G, CegrellClass::F);
    CHECK(f.verdict);
    CHECK(f.measure < tol::class_tol(1.0));
    GridFunction m1 = GridFunction::constant(g, -1.0);
    CHECK_FALSE(class_membership(m1, CegrellClass::N).verdict);
    CHECK_FALSE(class_membership(m1, CegrellClass::E0).verdict);
    CHECK(class_membership(psh_projection(truncate(G, 2.0)), CegrellClass::E0).verdict);
    CHECK_FALSE(class_membership(G, CegrellClass::E0).verdict);
    GridFunction H = harmonic_x(g);
    GridFunction u = sum_of({H, G});
    ClassVerdict nh = class_membership(u, CegrellClass::NH, &H);
    CHECK(nh.verdict);
    REQUIRE(nh.witness.has_value());
    CHECK(sup_distance(*nh.witness, G) < tol::class_tol(1.0));
    CHECK_THROWS_AS(class_membership(u, CegrellClass::NH, nullptr), InvalidArgument);
}
