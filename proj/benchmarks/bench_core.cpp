#include <benchmark/benchmark.h>

#include "dflow/flow.hpp"
#include "dflow/initial_data.hpp"
#include "dflow/solver.hpp"
#include "dflow/spectral.hpp"

namespace {

using namespace dflow;

MapState sample(int n, const std::string& target_name) {
    Grid grid(n, 4.0 * 3.14159265358979323846);
    auto target = make_target(target_name);
    InitialDataSpec spec;
    spec.family = "perturbed-circle";
    spec.k = 2;
    spec.amp = 0.1;
    spec.mode = 5;
    return make_initial_data(grid, target, spec);
}

void BM_spectral_derivative(benchmark::State& state) {
    const MapState u = sample(static_cast<int>(state.range(0)), "s2");
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral::derivative(u.points, u.grid, 2));
    }
}
BENCHMARK(BM_spectral_derivative)->Arg(256)->Arg(1024)->Arg(4096);

void BM_rhs_extrinsic(benchmark::State& state) {
    const MapState u = sample(256, state.range(0) == 0 ? "s2" : "s6");
    const FlowCoefficients c{1.0, 0.5, 1e-3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(rhs_extrinsic(u.points, u.grid, *u.target, c));
    }
}
BENCHMARK(BM_rhs_extrinsic)->Arg(0)->Arg(1);

void BM_solver_step(benchmark::State& state) {
    const MapState u = sample(static_cast<int>(state.range(0)), "s2");
    SolverConfig cfg{u.grid};
    cfg.coefficients = {1.0, 0.5, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(step(u, cfg));
    }
}
BENCHMARK(BM_solver_step)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
