#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "helpers.hpp"
#include "pluri/error.hpp"
#include "pluri/psh.hpp"
#include "pluri/radial.hpp"

using namespace pluri;
using namespace th;

namespace {
constexpr double pi = std::numbers::pi;

RadialProfile lin(double c) { return make_profile([c](double s) { return c * s; }); }
}  // namespace

TEST_CASE("radial_to_grid") {
    auto g = disc(33);
    GridFunction a = radial_to_grid(lin(1.0), g);
    REQUIRE(a.poles().size() == 1);
    CHECK(a.poles()[0].c == doctest::Approx(1.0));
    CHECK(sup_distance(a, build_function(green(), g)) < 1e-9);
    GridFunction b = radial_to_grid(make_profile([](double s) { return std::exp(s) - 1; }), g);
    CHECK(b.bounded());
    // the profile is flat left of s_min = -8
    for (std::size_t i = 0; i < g->size(); ++i) REQUIRE(std::abs(b.value(i) - (radius_of(*g, i) - 1)) < 4e-4);
    GridFunction c = radial_to_grid(make_profile([](double s) { return std::max(s, -1.0); }), g);
    CHECK(c.bounded());
    CHECK_THROWS_AS(radial_to_grid(lin(1.0), bidisc(9)), InvalidArgument);
}

TEST_CASE("radial_ma_mass") {
    for (int n : {1, 2}) {
        double full = std::pow(2 * pi, n);
        for (double r : {0.1, 0.5, 1.0}) CHECK(radial_ma_mass(lin(1.0), r, n) == doctest::Approx(full));
        RadialProfile m = make_profile([](double s) { return std::max(s, -1.0); });
        CHECK(radial_ma_mass(m, 0.5, n) == doctest::Approx(full).epsilon(1e-3));
        CHECK(radial_ma_mass(m, 0.3, n) == doctest::Approx(0.0));
        CHECK(radial_atom_mass(lin(2.0), n) == doctest::Approx(std::pow(4 * pi, n)));
    }
    RadialProfile e = make_profile([](double s) { return std::exp(s) - 1; });
    double m = radial_ma_mass(e, 1.0, 1);
    CHECK(m == doctest::Approx(2 * pi).epsilon(0.01));
    // against the grid measure
    GridFunction u = radial_to_grid(e, disc(129));
    CHECK(ma_measure(u).total_mass() == doctest::Approx(m).epsilon(0.05));
    // nondecreasing in r, atom mass as r -> 0
    RadialProfile mix = make_profile([](double s) { return 0.5 * s + std::exp(2 * s) - 1; });
    double prev = 0.0;
    for (double r = 0.01; r <= 1.0; r += 0.07) {
        double v = radial_ma_mass(mix, r, 1);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    CHECK(radial_ma_mass(mix, 1e-3, 1) == doctest::Approx(radial_atom_mass(mix, 1)).epsilon(1e-3));
}

TEST_CASE("radial_envelope") {
    RadialProfile m = radial_min(lin(1.0), make_profile([](double) { return -1.0; }));
    RadialProfile env = radial_envelope(m);
    // on the half-line the hull of min(s, -1) is s - 1
    for (int k = 0; k < env.size(); k += 64) CHECK(env.phi[static_cast<std::size_t>(k)] == doctest::Approx(env.s(k) - 1.0).epsilon(1e-9));
    RadialProfile convex = make_profile([](double s) { return std::exp(2 * s) - 1 + 0.5 * s; });
    CHECK(profile_sup_distance(radial_envelope(convex), convex) < 1e-12);
    RadialProfile zero = make_profile([](double) { return 0.0; });
    CHECK(profile_sup_distance(radial_envelope(zero), zero) == 0.0);
    // a bounded smooth profile has no Lelong coefficient
    CHECK(make_profile([](double s) { return std::exp(s) - 1; }).nu == 0.0);
    CHECK(make_profile([](double s) { return 0.75 * s + std::exp(0.5 * s) - 1; }).nu == doctest::Approx(0.75));
    // idempotent
    RadialProfile wavy = make_profile([](double s) { return std::min(std::sin(3 * s) - 0.5, 0.3 * s); });
    RadialProfile once = radial_envelope(wavy);
    CHECK(profile_sup_distance(radial_envelope(once), once) < 1e-14);
    CHECK(check_profile(once, 1e-12).verdict);
}

TEST_CASE("radial_residual") {
    CHECK(profile_sup_distance(radial_residual(lin(1.0)), lin(1.0)) < 1e-9);
    CHECK(profile_sup_distance(radial_residual(lin(2.0)), lin(2.0)) < 1e-9);
    RadialProfile b = make_profile([](double s) { return std::max(s, -2.0); });
    RadialProfile zero = make_profile([](double) { return 0.0; });
    RadialResidualReport rep;
    CHECK(profile_sup_distance(radial_residual(b, 1e-12, &rep), zero) < 1e-12);
    CHECK(rep.stabilized);
    RadialProfile mix = make_profile([](double s) { return 0.5 * s + std::exp(2 * s) - 1; });
    CHECK(profile_sup_distance(radial_residual(mix), lin(0.5)) < 1e-6);
}

TEST_CASE("radial rooftop equality: P[u](v) = P(g_u, v) in the radial class") {
    RadialProfile u = make_profile([](double s) { return 0.5 * s + std::exp(2 * s) - 1; });
    RadialProfile v = make_profile([](double s) { return std::max(1.5 * s, -2.0); });
    RadialProfile gu = radial_residual(u);
    RadialProfile lhs = radial_rooftop(gu, v);
    // P(u + C, v) for large C
    RadialProfile big = radial_rooftop(profile_from_samples([&] {
        std::vector<double> p = u.phi;
        for (double& x : p) x += 1024.0;
        return p;
    }()), v);
    CHECK(profile_sup_distance(lhs, big) < 1e-6);
}

TEST_CASE("radial_geodesic") {
    RadialProfile p = make_profile([](double s) { return 0.5 * s + std::exp(2 * s) - 1; });
    for (double t : {0.0, 0.3, 1.0}) CHECK(profile_sup_distance(radial_geodesic(p, p, t), p) < 1e-9);
    RadialProfile q = profile_from_samples([&] {
        std::vector<double> v = p.phi;
        for (double& x : v) x -= 0.4;
        return v;
    }());
    for (double t : {0.25, 0.5}) {
        RadialProfile gt = radial_geodesic(p, q, t);
        RadialProfile exp = profile_from_samples([&] {
            std::vector<double> v = p.phi;
            for (double& x : v) x -= 0.4 * t;
            return v;
        }());
        CHECK(profile_sup_distance(gt, exp) < 1e-9);
    }
    // s to max(s, -1): the transform of s is +inf below slope 1, so every
    // interior slice keeps the pole and equals s
    RadialProfile g = radial_geodesic(lin(1.0), make_profile([](double s) { return std::max(s, -1.0); }), 0.25);
    CHECK(g.nu == doctest::Approx(1.0));
    for (int k = 0; k < g.size(); k += 97) CHECK(g.phi[static_cast<std::size_t>(k)] == doctest::Approx(g.s(k)).epsilon(1e-9));
}

TEST_CASE("legendre transform of s") {
    RadialProfile p = lin(1.0);
    CHECK(std::isinf(legendre(p, 0.5)));
    CHECK(legendre(p, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("profile CSV round trip and validation") {
    RadialProfile p = make_profile([](double s) { return std::max(2 * s, -1.5); });
    std::stringstream ss;
    write_profile_csv(ss, p);
    RadialProfile r = read_profile_csv(ss);
    CHECK(profile_sup_distance(p, r) < 1e-12);
    CHECK(r.nu == doctest::Approx(p.nu));
    RadialProfile bad = make_profile([](double s) { return -s * s; });
    CHECK_FALSE(check_profile(bad, 1e-12).verdict);
}
