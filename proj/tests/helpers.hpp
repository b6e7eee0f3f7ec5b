#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "pluri/catalogue.hpp"
#include "pluri/grid.hpp"
#include "pluri/grid_function.hpp"

namespace th {

using pluri::FunctionSpec;
using pluri::ProfileSpec;

inline FunctionSpec cst(double v) {
    FunctionSpec f;
    f.kind = "const";
    f.value = v;
    return f;
}

inline FunctionSpec quad() {
    FunctionSpec f;
    f.kind = "quadratic";
    return f;
}

inline FunctionSpec green(double c = 1.0, pluri::Point at = {}) {
    FunctionSpec f;
    f.kind = "green";
    f.c = c;
    f.at = at;
    return f;
}

inline FunctionSpec logcoord(int axis, double c = 1.0, double a_re = 0.0) {
    FunctionSpec f;
    f.kind = "log_coordinate";
    f.axis = axis;
    f.c = c;
    f.a_re = a_re;
    return f;
}

inline FunctionSpec combine(const char* kind, std::initializer_list<FunctionSpec> args) {
    FunctionSpec f;
    f.kind = kind;
    f.args = args;
    return f;
}

inline FunctionSpec maxf(std::initializer_list<FunctionSpec> args) { return combine("max", args); }
inline FunctionSpec sumf(std::initializer_list<FunctionSpec> args) { return combine("sum", args); }

inline FunctionSpec trunc(FunctionSpec u, double level) {
    FunctionSpec f;
    f.kind = "truncate";
    f.level = level;
    f.args = {u};
    return f;
}

inline FunctionSpec scale(FunctionSpec u, double factor) {
    FunctionSpec f;
    f.kind = "scale";
    f.factor = factor;
    f.args = {u};
    return f;
}

inline FunctionSpec shift(FunctionSpec u, double v) {
    FunctionSpec f;
    f.kind = "shift";
    f.value = v;
    f.args = {u};
    return f;
}

// Pole-free grid function sampled from f at nodes and boundary crossings.
template <class F>
pluri::GridFunction sampled(pluri::GridPtr g, F f) {
    std::vector<double> bg(g->size()), bd(g->stencil().crossings.size());
    for (std::size_t i = 0; i < g->size(); ++i) bg[i] = f(g->point(i));
    for (std::size_t c = 0; c < bd.size(); ++c) bd[c] = f(g->stencil().crossings[c].point);
    return pluri::GridFunction(g, std::move(bg), std::move(bd));
}

inline pluri::GridPtr disc(int N) { return pluri::make_grid(pluri::make_domain(pluri::DomainKind::ball, 1), N); }
inline pluri::GridPtr ball2(int N) { return pluri::make_grid(pluri::make_domain(pluri::DomainKind::ball, 2), N); }
inline pluri::GridPtr bidisc(int N) {
    return pluri::make_grid(pluri::make_domain(pluri::DomainKind::polydisc, 2), N);
}

inline double radius_of(const pluri::Grid& g, std::size_t i) {
    const auto& p = g.point(i);
    return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]);
}

}  // namespace th
