// Micro-benchmarks for the hot paths: the full-memory GL convolution, the
// fractional ODE stepper, and one closed-loop step of the reference scenario.

#include <benchmark/benchmark.h>

#include <cmath>

#include "focs/harness.hpp"

using namespace focs;

static void BM_GlMemoryConvolution(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const GLKernel kern = gl_weights(FractionalOrder(0.7), n);
    std::vector<double> history(n + 1);
    for (std::size_t k = 0; k <= n; ++k) history[k] = std::sin(1e-3 * static_cast<double>(k));
    for (auto _ : state) benchmark::DoNotOptimize(caputo_apply(kern, history, 1e-3));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * static_cast<int64_t>(n));
}
BENCHMARK(BM_GlMemoryConvolution)->Arg(1000)->Arg(10000)->Arg(20000);

static void BM_SolveScalarOde(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const TimeGrid grid(0.0, 5.0 / static_cast<double>(n), n);
    const FractionalOrder half(0.5);
    const double x0 = 1.0;
    for (auto _ : state) {
        const FosSolution sol = solve_fos(
            [](double, std::span<const double> x, std::span<double> out) { out[0] = -x[0]; },
            std::span<const FractionalOrder>(&half, 1), std::span<const double>(&x0, 1), grid);
        benchmark::DoNotOptimize(sol.states.back()[0]);
    }
}
BENCHMARK(BM_SolveScalarOde)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_ClosedLoopScenario(benchmark::State& state) {
    ScenarioConfig config = example1_case(ControllerVariant::thm1);
    config.grid = TimeGrid(0.0, 1e-3, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        const SimulationRecord rec = run_scenario(config);
        benchmark::DoNotOptimize(rec.eps.back());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_ClosedLoopScenario)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
