#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pluri/catalogue.hpp"
#include "pluri/error.hpp"
#include "pluri/grid.hpp"
#include "pluri/io.hpp"

using namespace pluri;

TEST_CASE("make_domain accepts canonical domains and rejects bad arguments") {
    Domain disc = make_domain(DomainKind::ball, 1);
    CHECK(disc.n == 1);
    CHECK(disc.radius == 1.0);
    Domain bidisc = make_domain(DomainKind::polydisc, 2);
    CHECK(bidisc.real_dim() == 4);
    CHECK_THROWS_WITH_AS(make_domain(DomainKind::ball, 3), doctest::Contains("unsupported dimension"), InvalidArgument);
    CHECK_THROWS_AS(make_domain(DomainKind::ball, 1, 0.0), InvalidArgument);
    CHECK_THROWS_AS(make_domain(DomainKind::ball, 1, -2.0), InvalidArgument);
}

TEST_CASE("exhaustion function is negative inside and vanishes on the boundary") {
    for (auto kind : {DomainKind::ball, DomainKind::polydisc}) {
        Domain d = make_domain(kind, 2, 2.0);
        CHECK(d.psi(Point{0.3, 0.1, -0.4, 0.2}) < 0.0);
        CHECK(d.psi(Point{2.0, 0.0, 0.0, 0.0}) == doctest::Approx(0.0));
    }
    Domain bd = make_domain(DomainKind::polydisc, 2);
    CHECK(bd.psi(Point{0.5, 0.0, 0.0, 0.25}) == doctest::Approx(std::log(0.5)));
}

TEST_CASE("exhaustion radii r_j = 1 - 2^-j") {
    Domain disc = make_domain(DomainKind::ball, 1);
    CHECK(exhaustion_domain(disc, 1).radius == doctest::Approx(0.5));
    CHECK(exhaustion_domain(disc, 3).radius == doctest::Approx(0.875));
    CHECK(exhaustion_domain(make_domain(DomainKind::polydisc, 2), 2).radius == doctest::Approx(0.75));
    CHECK_THROWS_AS(exhaustion_domain(disc, 0), InvalidArgument);
}

TEST_CASE("grid spacing, lattice size and the minimum resolution") {
    auto g = make_grid(make_domain(DomainKind::ball, 1), 65);
    CHECK(g->h() == doctest::Approx(1.0 / 32));
    CHECK(g->lattice_size() == 65u * 65u);
    auto b = make_grid(make_domain(DomainKind::polydisc, 2), 21);
    CHECK(b->lattice_size() == 194481u);
    CHECK_THROWS_WITH_AS(make_grid(make_domain(DomainKind::ball, 1), 5), doctest::Contains("stencil does not fit"), InvalidArgument);
}

TEST_CASE("stencil contains the coordinate directions and the n = 2 diagonals") {
    auto g1 = make_grid(make_domain(DomainKind::ball, 1), 17);
    auto g2 = make_grid(make_domain(DomainKind::ball, 2), 11);
    CHECK(g1->lines() >= 1);
    CHECK(g2->lines() >= 6);
    // e_1 and e_2 appear as the first steps of some line.
    bool e1 = false, e2 = false;
    for (const auto& d : g2->directions()) {
        e1 = e1 || (d.v == Offset{1, 0, 0, 0});
        e2 = e2 || (d.v == Offset{0, 0, 1, 0});
    }
    CHECK(e1);
    CHECK(e2);
}

TEST_CASE("mask completeness: every stencil step lands on a node or a boundary crossing") {
    for (auto kind : {DomainKind::ball, DomainKind::polydisc}) {
        auto g = make_grid(make_domain(kind, 2), 11);
        const StepTable& st = g->stencil();
        for (std::size_t i = 0; i < g->size(); ++i)
            for (int k = 0; k < st.size(); ++k) {
                int nb = st.at(i, k);
                if (nb >= 0) {
                    REQUIRE(static_cast<std::size_t>(nb) < g->size());
                } else {
                    const Crossing& c = st.crossings[static_cast<std::size_t>(-nb - 1)];
                    REQUIRE(c.theta > 0.0);
                    // Lattice points within the interior margin are not nodes, so the
                    // arm may run slightly past the lattice step.
                    Point y = g->point(i);
                    for (int a = 0; a < 4; ++a) y[a] += st.steps[static_cast<std::size_t>(k)][a] * g->h();
                    REQUIRE(g->domain().gauge(y) >= 1.0 - 0.25 * g->h());
                    REQUIRE(g->domain().gauge(c.point) == doctest::Approx(1.0).epsilon(1e-9));
                }
            }
    }
}

TEST_CASE("boundary consistency: psi at ghost nodes is >= -C h") {
    auto g = make_grid(make_domain(DomainKind::ball, 1), 33);
    for (std::size_t lin : g->ghost_nodes()) {
        Point x = g->lattice_point(g->lattice_multi(lin));
        CHECK(g->domain().psi(x) >= -2.0 * g->h());
    }
}

TEST_CASE("exhaustion node sets increase strictly and exhaust the grid") {
    auto g = make_grid(make_domain(DomainKind::ball, 1), 33);
    std::size_t prev = 0;
    bool covered = false;
    for (int j = 1; j <= 12 && !covered; ++j) {
        auto m = g->exhaustion_mask(j);
        std::size_t c = 0;
        for (char x : m) c += x != 0;
        CHECK(c >= prev);
        if (j <= 3) CHECK(c > prev);
        prev = c;
        covered = c == g->size();
    }
    CHECK(covered);
}

TEST_CASE("node volumes sum to the domain volume") {
    auto g = make_grid(make_domain(DomainKind::ball, 1), 65);
    double v = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) v += g->node_volume(i);
    CHECK(v == doctest::Approx(M_PI).epsilon(1e-3));
}

TEST_CASE("binary grid format round-trips values, poles and boundary data") {
    auto g = make_grid(make_domain(DomainKind::ball, 1), 17);
    FunctionSpec G;
    G.kind = "green";
    G.at = {0.25, -0.125, 0, 0};
    FunctionSpec q;
    q.kind = "quadratic";
    FunctionSpec s;
    s.kind = "sum";
    s.args = {G, q};
    GridFunction u = build_function(s, g);
    std::stringstream ss;
    write_grid_binary(ss, u);
    GridFunction w = read_grid_binary(ss);
    REQUIRE(w.size() == u.size());
    CHECK(w.poles().size() == 1);
    CHECK(w.poles()[0].node == u.poles()[0].node);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(w.background()[i] == u.background()[i]);
    CHECK(w.boundary_background() == u.boundary_background());
    std::stringstream bad("XXXX");
    CHECK_THROWS_AS(read_grid_binary(bad), InvalidArgument);
}

TEST_CASE("grid CSV has one row per node plus a header") {
    auto g = make_grid(make_domain(DomainKind::ball, 1), 9);
    std::stringstream ss;
    write_grid_csv(ss, GridFunction::constant(g, -1.0));
    std::string line;
    std::getline(ss, line);
    CHECK(line == "x1,y1,value,background");
    std::size_t rows = 0;
    while (std::getline(ss, line)) ++rows;
    CHECK(rows == g->size());
}
