#include "pluri/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "pluri/error.hpp"

namespace pluri {

const char* to_string(DomainKind k) { return k == DomainKind::ball ? "ball" : "polydisc"; }

DomainKind domain_kind_from_string(const char* s) {
    if (std::strcmp(s, "ball") == 0) return DomainKind::ball;
    if (std::strcmp(s, "polydisc") == 0 || std::strcmp(s, "bidisc") == 0) return DomainKind::polydisc;
    throw InvalidArgument(std::string("unknown domain kind '") + s + "'");
}

double Domain::gauge(const Point& x) const {
    if (kind == DomainKind::ball) {
        double r2 = 0.0;
        for (int k = 0; k < 2 * n; ++k) r2 += x[k] * x[k];
        return std::sqrt(r2) / radius;
    }
    double m = 0.0;
    for (int j = 0; j < n; ++j) m = std::max(m, std::hypot(x[2 * j], x[2 * j + 1]));
    return m / radius;
}

namespace {

// Positive root of a t^2 + b t + c = 0 with c < 0 (start point inside).
double positive_root(double a, double b, double c) {
    if (a <= 0.0) return std::numeric_limits<double>::infinity();
    double disc = std::max(0.0, b * b - 4.0 * a * c);
    double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double r1 = q / a;
    double r2 = (q != 0.0) ? c / q : r1;
    double best = std::numeric_limits<double>::infinity();
    if (r1 > 0.0) best = r1;
    if (r2 > 0.0) best = std::min(best, r2);
    return best;
}

}  // namespace

double Domain::boundary_hit(const Point& x, const Point& s) const {
    double R2 = radius * radius;
    if (kind == DomainKind::ball) {
        double a = 0, b = 0, c = -R2;
        for (int k = 0; k < 2 * n; ++k) {
            a += s[k] * s[k];
            b += 2.0 * x[k] * s[k];
            c += x[k] * x[k];
        }
        return positive_root(a, b, c);
    }
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        double sx = s[2 * j], sy = s[2 * j + 1];
        double a = sx * sx + sy * sy;
        if (a == 0.0) continue;
        double b = 2.0 * (x[2 * j] * sx + x[2 * j + 1] * sy);
        double c = x[2 * j] * x[2 * j] + x[2 * j + 1] * x[2 * j + 1] - R2;
        best = std::min(best, positive_root(a, b, c));
    }
    return best;
}

Domain make_domain(DomainKind kind, int n, double radius) {
    if (n != 1 && n != 2) throw InvalidArgument("unsupported dimension n=" + std::to_string(n));
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("radius must be positive");
    return Domain{kind, n, radius};
}

double exhaustion_radius(int j) {
    if (j < 1) throw InvalidArgument("exhaustion index must be >= 1");
    return 1.0 - std::ldexp(1.0, -j);
}

Domain exhaustion_domain(const Domain& d, int j) {
    Domain out = d;
    out.radius = d.radius * exhaustion_radius(j);
    return out;
}

}  // namespace pluri
