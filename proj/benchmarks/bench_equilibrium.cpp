#include <benchmark/benchmark.h>

#include <mopkit/mopkit.hpp>

using namespace mopkit;

static void BM_ArcsineEquilibrium(benchmark::State& state) {
  const auto prob = EquilibriumProblem::angelesco({{-1.0, 1.0}}, {1.0}, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(minimize_equilibrium(prob));
}
BENCHMARK(BM_ArcsineEquilibrium)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_AngelescoEquilibrium(benchmark::State& state) {
  const auto prob = EquilibriumProblem::angelesco({{-1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.5}, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(minimize_equilibrium(prob));
}
BENCHMARK(BM_AngelescoEquilibrium)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_LogEnergy(benchmark::State& state) {
  const auto mu = DiscreteMeasure::uniform({-1.0, 1.0}, static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(log_energy(mu, mu, EnergyMode::floored));
}
BENCHMARK(BM_LogEnergy)->Arg(500)->Arg(2000);
