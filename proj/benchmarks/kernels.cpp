#include <benchmark/benchmark.h>

#include "pluri/catalogue.hpp"
#include "pluri/dirichlet.hpp"
#include "pluri/envelope.hpp"
#include "pluri/psh.hpp"

using namespace pluri;

namespace {

FunctionSpec truncated_green(double level) {
    FunctionSpec g;
    g.kind = "green";
    FunctionSpec t;
    t.kind = "truncate";
    t.level = level;
    t.args = {g};
    return t;
}

GridFunction quadratic_on(const GridPtr& g) {
    FunctionSpec q;
    q.kind = "quadratic";
    return build_function(q, g);
}

void BM_MaMeasure1(benchmark::State& st) {
    auto g = make_grid(make_domain(DomainKind::ball, 1), static_cast<int>(st.range(0)));
    GridFunction u = build_function(truncated_green(4.0), g);
    for (auto _ : st) benchmark::DoNotOptimize(ma_measure(u).total_mass());
    st.counters["nodes"] = static_cast<double>(g->size());
}
BENCHMARK(BM_MaMeasure1)->Arg(65)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

void BM_MaMeasure2(benchmark::State& st) {
    auto g = make_grid(make_domain(DomainKind::ball, 2), static_cast<int>(st.range(0)));
    GridFunction u = build_function(truncated_green(4.0), g);
    for (auto _ : st) benchmark::DoNotOptimize(ma_measure(u).total_mass());
    st.counters["nodes"] = static_cast<double>(g->size());
}
BENCHMARK(BM_MaMeasure2)->Arg(13)->Arg(17)->Arg(21)->Unit(benchmark::kMillisecond);

// Rooftop of a truncated Green function with |z|^2 - 1: one full SOR envelope.
void BM_Envelope1(benchmark::State& st) {
    auto g = make_grid(make_domain(DomainKind::ball, 1), static_cast<int>(st.range(0)));
    GridFunction u = build_function(truncated_green(2.0), g), v = quadratic_on(g);
    EnvelopeStats stats;
    for (auto _ : st) {
        GridFunction p = envelope(Obstacle::min_of({{&u, 0.0}, {&v, 0.0}}), {}, &stats);
        benchmark::DoNotOptimize(p.background().data());
    }
    st.counters["sweeps"] = stats.sweeps;
}
BENCHMARK(BM_Envelope1)->Arg(33)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_Envelope2(benchmark::State& st) {
    auto g = make_grid(make_domain(DomainKind::ball, 2), static_cast<int>(st.range(0)));
    GridFunction u = build_function(truncated_green(2.0), g), v = quadratic_on(g);
    EnvelopeStats stats;
    for (auto _ : st) {
        GridFunction p = envelope(Obstacle::min_of({{&u, 0.0}, {&v, 0.0}}), {}, &stats);
        benchmark::DoNotOptimize(p.background().data());
    }
    st.counters["sweeps"] = stats.sweeps;
}
BENCHMARK(BM_Envelope2)->Arg(13)->Arg(17)->Unit(benchmark::kMillisecond);

void BM_Residual1(benchmark::State& st) {
    auto g = make_grid(make_domain(DomainKind::ball, 1), static_cast<int>(st.range(0)));
    FunctionSpec G;
    G.kind = "green";
    GridFunction u = sum_of({build_function(G, g), quadratic_on(g)});
    for (auto _ : st) benchmark::DoNotOptimize(residual(u).background().data());
}
BENCHMARK(BM_Residual1)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

void BM_Dirichlet1(benchmark::State& st) {
    auto g = make_grid(make_domain(DomainKind::ball, 1), static_cast<int>(st.range(0)));
    ProblemSpec ps;
    ps.seed = 3;
    MeasureField mu = random_measure(g, ps);
    GridFunction zero = GridFunction::constant(g, 0.0);
    for (auto _ : st) benchmark::DoNotOptimize(solve_dirichlet({mu, zero, {}}).background().data());
}
BENCHMARK(BM_Dirichlet1)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
