#include <benchmark/benchmark.h>

#include "gk/dynamics.hpp"
#include "gk/homogeneous.hpp"
#include "gk/interaction.hpp"
#include "gk/scenarios.hpp"

namespace {

void BM_GameTable(benchmark::State& state) {
    const auto lattice = gk::uniform_speed_lattice(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gk::game_table(lattice, 0.61, 0.4, 0.9));
    }
}
BENCHMARK(BM_GameTable)->Arg(2)->Arg(6)->Arg(16);

void BM_RoadworksStep(benchmark::State& state) {
    const auto sc = gk::build_roadworks(0.4);
    auto s = gk::simulate(sc.initial, sc.lattice, sc.bc, sc.profile, 0.15, 30.0).states.back();
    for (auto _ : state) {
        benchmark::DoNotOptimize(gk::step(s, sc.lattice, sc.bc, sc.profile, 0.15));
    }
}
BENCHMARK(BM_RoadworksStep);

void BM_SteadyState(benchmark::State& state) {
    const auto lattice = gk::uniform_speed_lattice(6);
    const double rho = static_cast<double>(state.range(0)) / 100.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gk::steady_state(rho, lattice, 0.61, 1.0));
    }
}
BENCHMARK(BM_SteadyState)->Arg(10)->Arg(50)->Arg(90)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
