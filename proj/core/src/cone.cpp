#include "pluri/cone.hpp"

#include <cmath>
#include <limits>

namespace pluri {

double LineSystem::bound(std::span<const double> w, std::size_t i) const {
    double best = std::numeric_limits<double>::infinity();
    for (int l = 0; l < lines; ++l) {
        std::size_t s = slot(i, l);
        if (den[s] == 0.0) continue;
        const int* p = &nb[s * 4];
        double sum = cst[s];
        for (int k = 0; k < 4; ++k)
            if (p[k] >= 0) sum += w[static_cast<std::size_t>(p[k])];
        best = std::min(best, sum / den[s]);
    }
    return best;
}

LineSystem build_line_system(const Grid& g, const Skeleton& skel, std::span<const double> bd) {
    LineSystem sys;
    sys.lines = g.lines();
    const std::size_t M = g.size();
    const StepTable& st = g.stencil();
    sys.nb.assign(M * sys.lines * 4, -1);
    sys.den.assign(M * sys.lines, 4.0);
    sys.cst.assign(M * sys.lines, 0.0);
    const auto& sigma = skel.line_curvature();
    for (std::size_t i = 0; i < M; ++i) {
        for (int l = 0; l < sys.lines; ++l) {
            std::size_t s = sys.slot(i, l);
            double den = 4.0, cst = sigma[s];
            bool free_end = false;
            for (int k = 0; k < 4; ++k) {
                int nb = st.at(i, 4 * l + k);
                if (nb >= 0) {
                    sys.nb[s * 4 + k] = nb;
                    continue;
                }
                std::size_t c = static_cast<std::size_t>(-nb - 1);
                double th = st.crossings[c].theta;
                if (!std::isfinite(bd[c])) {
                    free_end = true;
                    continue;
                }
                den += 1.0 / th - 1.0;
                cst += bd[c] / th;
            }
            sys.den[s] = free_end ? 0.0 : den;
            sys.cst[s] = free_end ? 0.0 : cst;
        }
    }
    return sys;
}

double step_value(const Grid& g, std::span<const double> w, std::span<const double> bd, std::size_t i, int k) {
    const StepTable& st = g.stencil();
    int nb = st.at(i, k);
    if (nb >= 0) return w[static_cast<std::size_t>(nb)];
    const Crossing& c = st.crossings[static_cast<std::size_t>(-nb - 1)];
    return w[i] + (bd[static_cast<std::size_t>(-nb - 1)] - w[i]) / c.theta;
}

}  // namespace pluri
