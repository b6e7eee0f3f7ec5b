#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace pluri {

enum class DomainKind { ball, polydisc };

const char* to_string(DomainKind k);
DomainKind domain_kind_from_string(const char* s);

// Points of C^n are stored as 2n real coordinates (x1, y1, x2, y2).
using Point = std::array<double, 4>;

struct Domain {
    DomainKind kind = DomainKind::ball;
    int n = 1;
    double radius = 1.0;

    int real_dim() const { return 2 * n; }

    // Scaled gauge: |z|/R for the ball, max_j |z_j|/R for the polydisc.
    double gauge(const Point& x) const;
    // Exhaustion function psi = log gauge, negative inside, 0 on the boundary.
    double psi(const Point& x) const { return std::log(gauge(x)); }
    bool contains(const Point& x) const { return gauge(x) < 1.0; }

    // Smallest theta > 0 with x + theta*s on the boundary; x must be inside.
    double boundary_hit(const Point& x, const Point& s) const;

    bool operator==(const Domain&) const = default;
};

Domain make_domain(DomainKind kind, int n, double radius = 1.0);

// r_j = 1 - 2^{-j}
double exhaustion_radius(int j);
Domain exhaustion_domain(const Domain& d, int j);

inline std::complex<double> zcoord(const Point& x, int j) { return {x[2 * j], x[2 * j + 1]}; }

}  // namespace pluri
