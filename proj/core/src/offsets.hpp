#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "pluri/grid.hpp"
#include "pluri/pole.hpp"

namespace pluri::detail {

// Differences of pole skeletons: sum_j (c_term_j - c_target_j) G_j over the
// union of carriers. On a carrier the sum is +inf when the term is weaker
// there and -inf when it is stronger.
struct OffsetTerm {
    PoleSpec pole;
    double dc;
};

inline std::vector<OffsetTerm> offset_terms(const std::vector<PoleSpec>& term, const std::vector<PoleSpec>& target) {
    std::vector<OffsetTerm> out;
    for (const auto& p : merge_max(term, target)) {
        double dc = coefficient_of(term, p) - coefficient_of(target, p);
        if (dc != 0.0) out.push_back({p, dc});
    }
    return out;
}

inline double offset_limit(double dc) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return dc < 0 ? inf : -inf;
}

inline double offset_at_point(const Domain& dom, const std::vector<OffsetTerm>& terms, const Point& x) {
    double s = 0.0;
    for (const auto& t : terms) {
        double G = pole_model_value(dom, t.pole, x);
        if (!std::isfinite(G)) return offset_limit(t.dc);
        s += t.dc * G;
    }
    return s;
}

inline double offset_at_node(const Grid& g, const std::vector<OffsetTerm>& terms, std::size_t i) {
    double s = 0.0;
    for (const auto& t : terms) {
        if (on_carrier(g, t.pole, i)) return offset_limit(t.dc);
        double G = pole_model_value(g.domain(), t.pole, g.point(i));
        if (!std::isfinite(G)) return offset_limit(t.dc);
        s += t.dc * G;
    }
    return s;
}

}  // namespace pluri::detail
