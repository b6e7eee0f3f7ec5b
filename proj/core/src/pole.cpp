#include "pluri/pole.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pluri/error.hpp"

namespace pluri {

namespace {

using C = std::complex<double>;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double snap(double v, double R, double h) { return -R + std::round((v + R) / h) * h; }

// Squared modulus of the ball automorphism phi_p(z) on the unit ball, written
// so that it stays accurate as z -> p.
double ball_phi_sq(const C* z, const C* p, int n) {
    double zp2 = 0, z2 = 0, p2 = 0;
    C zp(0, 0);
    for (int j = 0; j < n; ++j) {
        zp2 += std::norm(z[j] - p[j]);
        z2 += std::norm(z[j]);
        p2 += std::norm(p[j]);
        zp += z[j] * std::conj(p[j]);
    }
    double lag = 0.0;  // |z|^2|p|^2 - |<z,p>|^2 as a sum of squares
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) lag += std::norm((z[j] - p[j]) * p[k] - (z[k] - p[k]) * p[j]);
    double num = std::max(0.0, zp2 - lag);
    double den = std::norm(C(1, 0) - zp);
    return num / den;
}

// phi_p(z) for the unit ball and its derivative applied to xi.
void ball_phi(const C* z, const C* p, int n, const C* xi, C* out, C* dout) {
    double p2 = 0;
    C zp(0, 0), xp(0, 0);
    for (int j = 0; j < n; ++j) {
        p2 += std::norm(p[j]);
        zp += z[j] * std::conj(p[j]);
        xp += xi[j] * std::conj(p[j]);
    }
    const double s = std::sqrt(1.0 - p2);
    const C B = C(1, 0) - zp;
    for (int j = 0; j < n; ++j) {
        C Pz = p2 > 0 ? zp * p[j] / p2 : C(0, 0);
        C Px = p2 > 0 ? xp * p[j] / p2 : C(0, 0);
        C A = p[j] - Pz - s * (z[j] - Pz);
        C dA = -Px - s * (xi[j] - Px);
        out[j] = A / B;
        dout[j] = (dA * B + A * xp) / (B * B);
    }
}

}  // namespace

bool PoleSpec::same_carrier(const PoleSpec& o) const {
    if (model != o.model) return false;
    if (model == PoleModel::green) return node == o.node;
    if (axis != o.axis) return false;
    return std::abs(location[2 * axis] - o.location[2 * axis]) < 1e-12 &&
           std::abs(location[2 * axis + 1] - o.location[2 * axis + 1]) < 1e-12;
}

PoleSpec make_green_pole(const Grid& g, const Point& p, double c) {
    if (!(c > 0.0)) throw InvalidArgument("pole coefficient must be positive");
    int node = g.nearest_node(p);
    if (node < 0) throw InvalidArgument("pole location is not an interior node");
    PoleSpec s;
    s.model = PoleModel::green;
    s.node = node;
    s.location = g.point(static_cast<std::size_t>(node));
    s.c = c;
    return s;
}

PoleSpec make_hyperplane_pole(const Grid& g, int axis, std::complex<double> a, double c) {
    if (!(c > 0.0)) throw InvalidArgument("pole coefficient must be positive");
    if (axis < 0 || axis >= g.n()) throw InvalidArgument("hyperplane axis out of range");
    PoleSpec s;
    s.model = PoleModel::hyperplane;
    s.axis = axis;
    s.c = c;
    const double R = g.domain().radius;
    s.location[2 * axis] = snap(a.real(), R, g.h());
    s.location[2 * axis + 1] = snap(a.imag(), R, g.h());
    if (std::hypot(s.location[2 * axis], s.location[2 * axis + 1]) >= R)
        throw InvalidArgument("hyperplane does not meet the domain");
    return s;
}

double pole_model_value(const Domain& d, const PoleSpec& p, const Point& x) {
    const double R = d.radius;
    if (p.model == PoleModel::hyperplane) {
        double r = std::hypot(x[2 * p.axis] - p.location[2 * p.axis], x[2 * p.axis + 1] - p.location[2 * p.axis + 1]);
        return r == 0.0 ? kNegInf : std::log(r / R);
    }
    C z[2], q[2];
    for (int j = 0; j < d.n; ++j) {
        z[j] = zcoord(x, j) / R;
        q[j] = zcoord(p.location, j) / R;
    }
    if (d.kind == DomainKind::ball || d.n == 1) {
        double m2 = ball_phi_sq(z, q, d.n);
        return m2 == 0.0 ? kNegInf : 0.5 * std::log(m2);
    }
    double best = kNegInf;
    for (int j = 0; j < d.n; ++j) {
        double m = std::abs(z[j] - q[j]) / std::abs(C(1, 0) - std::conj(q[j]) * z[j]);
        if (m > 0.0) best = std::max(best, std::log(m));
    }
    return best;
}

double pole_levi_form(const Domain& d, const PoleSpec& p, const Point& x, const std::array<C, 2>& xi) {
    if (p.model == PoleModel::hyperplane || d.n == 1) return 0.0;
    if (d.kind == DomainKind::polydisc) return 0.0;
    const double R = d.radius;
    C z[2], q[2], w[2], dw[2], e[2];
    for (int j = 0; j < 2; ++j) {
        z[j] = zcoord(x, j) / R;
        q[j] = zcoord(p.location, j) / R;
        e[j] = xi[j] / R;
    }
    ball_phi(z, q, 2, e, w, dw);
    // Levi form of log|w| at w in direction dw.
    double w2 = std::norm(w[0]) + std::norm(w[1]);
    double d2 = std::norm(dw[0]) + std::norm(dw[1]);
    C ip = dw[0] * std::conj(w[0]) + dw[1] * std::conj(w[1]);
    if (w2 == 0.0) return std::numeric_limits<double>::infinity();
    return 0.5 * (d2 / w2 - std::norm(ip) / (w2 * w2));
}

bool pole_has_kinks(const Domain& d, const PoleSpec& p) {
    return p.model == PoleModel::green && d.kind == DomainKind::polydisc && d.n == 2;
}

bool on_carrier(const Grid& g, const PoleSpec& p, std::size_t node) {
    if (p.model == PoleModel::green) return static_cast<int>(node) == p.node;
    const Point& x = g.point(node);
    double tol = 0.25 * g.h();
    return std::abs(x[2 * p.axis] - p.location[2 * p.axis]) < tol &&
           std::abs(x[2 * p.axis + 1] - p.location[2 * p.axis + 1]) < tol;
}

namespace {

int find_carrier(const std::vector<PoleSpec>& a, const PoleSpec& p) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].same_carrier(p)) return static_cast<int>(i);
    return -1;
}

}  // namespace

double coefficient_of(const std::vector<PoleSpec>& a, const PoleSpec& p) {
    int i = find_carrier(a, p);
    return i < 0 ? 0.0 : a[static_cast<std::size_t>(i)].c;
}

void sort_poles(std::vector<PoleSpec>& a) {
    std::sort(a.begin(), a.end(), [](const PoleSpec& x, const PoleSpec& y) {
        if (x.model != y.model) return x.model < y.model;
        if (x.model == PoleModel::green) return x.node < y.node;
        if (x.axis != y.axis) return x.axis < y.axis;
        if (x.location[2 * x.axis] != y.location[2 * y.axis]) return x.location[2 * x.axis] < y.location[2 * y.axis];
        return x.location[2 * x.axis + 1] < y.location[2 * y.axis + 1];
    });
}

std::vector<PoleSpec> merge_max(const std::vector<PoleSpec>& a, const std::vector<PoleSpec>& b) {
    std::vector<PoleSpec> out = a;
    for (const auto& p : b) {
        int i = find_carrier(out, p);
        if (i < 0) out.push_back(p);
        else out[static_cast<std::size_t>(i)].c = std::max(out[static_cast<std::size_t>(i)].c, p.c);
    }
    sort_poles(out);
    return out;
}

std::vector<PoleSpec> merge_min(const std::vector<PoleSpec>& a, const std::vector<PoleSpec>& b) {
    std::vector<PoleSpec> out;
    for (const auto& p : a) {
        int i = find_carrier(b, p);
        if (i < 0) continue;
        PoleSpec q = p;
        q.c = std::min(p.c, b[static_cast<std::size_t>(i)].c);
        out.push_back(q);
    }
    sort_poles(out);
    return out;
}

std::vector<PoleSpec> merge_sum(const std::vector<PoleSpec>& a, const std::vector<PoleSpec>& b) {
    std::vector<PoleSpec> out = a;
    for (const auto& p : b) {
        int i = find_carrier(out, p);
        if (i < 0) out.push_back(p);
        else out[static_cast<std::size_t>(i)].c += p.c;
    }
    sort_poles(out);
    return out;
}

std::vector<PoleSpec> scale_poles(const std::vector<PoleSpec>& a, double s) {
    if (s == 0.0) return {};
    if (s < 0.0) throw InvalidArgument("negative multiple of a psh function");
    std::vector<PoleSpec> out = a;
    for (auto& p : out) p.c *= s;
    return out;
}

std::string describe(const PoleSpec& p) {
    std::ostringstream os;
    os.precision(6);
    if (p.model == PoleModel::green) {
        os << "green(c=" << p.c << ", node=" << p.node << ", at=(";
        for (int k = 0; k < 4; ++k) os << (k ? "," : "") << p.location[k];
        os << "))";
    } else {
        os << "hyperplane(c=" << p.c << ", z" << (p.axis + 1) << "=" << p.location[2 * p.axis] << "+"
           << p.location[2 * p.axis + 1] << "i)";
    }
    return os.str();
}

}  // namespace pluri
