#include <benchmark/benchmark.h>

#include "svi/implicit.hpp"
#include "svi/noise.hpp"
#include "svi/pathsolver.hpp"
#include "svi/signorini.hpp"

using namespace svi;

namespace {

CoeffSpec sine_mu(double amp) {
    CoeffTerm t;
    t.amplitude = amp;
    t.space.kind = SpaceKind::Sine;
    return CoeffSpec{{t}};
}

ForcingSpec halves() {
    ForcingSpec f;
    f.kind = ForcingKind::Halves;
    f.amplitude = 1.0;
    f.secondary = -4.0;
    return f;
}

Grid grid_for(int dim, std::size_t n, BoundaryKind bc = BoundaryKind::Dirichlet) {
    return dim == 1 ? build_grid(1, {1.0}, n, bc) : build_grid(2, {1.0, 1.0}, n, bc);
}

}  // namespace

static void BM_ImplicitSolve(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const Grid g = grid_for(dim, static_cast<std::size_t>(state.range(1)));
    const ImplicitOperator op(g, 1e-3);
    const Field rhs(g.size(), 1.0);
    const Field shift(g.size());
    for (auto _ : state) benchmark::DoNotOptimize(op.solve(shift.span(), rhs));
}
BENCHMARK(BM_ImplicitSolve)->Args({1, 255})->Args({1, 4095})->Args({2, 31})->Args({2, 63})->Unit(benchmark::kMicrosecond);

static void BM_StepInterior(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const Grid g = grid_for(dim, static_cast<std::size_t>(state.range(1)));
    const TimeGrid tg(0.1, 100);
    const BrownianPathSet p = sample_paths(tg, 1, 1, 0);
    const StepCoefficients c = assemble_coefficients(g, sine_mu(0.5), {}, halves(), p, 10, kDefaultMuCap);
    SolveConfig cfg;
    Field y(g.size(), 0.01);
    for (auto _ : state) benchmark::DoNotOptimize(step_interior(g, y, c, tg.dt(), cfg));
}
BENCHMARK(BM_StepInterior)->Args({1, 255})->Args({2, 31})->Args({2, 63})->Unit(benchmark::kMicrosecond);

static void BM_StepSignorini(benchmark::State& state) {
    const Grid g = grid_for(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)),
                            BoundaryKind::Neumann);
    const TimeGrid tg(0.1, 200);
    const BrownianPathSet p = sample_paths(tg, 1, 1, 0);
    const StepCoefficients c = assemble_coefficients(g, sine_mu(0.5), {}, halves(), p, 10, kDefaultMuCap);
    const BoundaryData bd = build_boundary_data(g, sine_mu(0.5), p, 10);
    SolveConfig cfg;
    Field y(g.size(), 0.01);
    for (auto _ : state) benchmark::DoNotOptimize(step_signorini(g, y, c, bd, tg.dt(), cfg));
}
BENCHMARK(BM_StepSignorini)->Args({1, 256})->Args({2, 32})->Unit(benchmark::kMicrosecond);

static void BM_SamplePaths(benchmark::State& state) {
    const TimeGrid tg(1.0, static_cast<std::size_t>(state.range(0)));
    std::uint64_t id = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_paths(tg, 2, 7, id++));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_SamplePaths)->Arg(1000)->Arg(10000);

static void BM_RefinePaths(benchmark::State& state) {
    const BrownianPathSet p = sample_paths(TimeGrid(1.0, 1000), 2, 7, 0);
    for (auto _ : state) benchmark::DoNotOptimize(refine_paths(p));
}
BENCHMARK(BM_RefinePaths);

static void BM_SolvePath(benchmark::State& state) {
    const Grid g = grid_for(1, static_cast<std::size_t>(state.range(0)));
    const TimeGrid tg(0.1, static_cast<std::size_t>(state.range(1)));
    InitialSpec x;
    x.kind = InitialKind::Sine;
    x.amplitude = 0.2;
    SolveConfig cfg;
    const BrownianPathSet p = sample_paths(tg, 1, 5, 0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_path(g, tg, sine_mu(0.5), {}, halves(), x, cfg, p));
}
BENCHMARK(BM_SolvePath)->Args({63, 100})->Args({255, 1000})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
