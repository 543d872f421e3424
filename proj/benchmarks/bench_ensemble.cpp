#include <benchmark/benchmark.h>

#include <random>

#include <mopkit/mopkit.hpp>

using namespace mopkit;

static void BM_JointDensity(benchmark::State& state) {
  const auto ws = build_nikishin(WeightSpec::constant({1.0, 2.0}), {WeightSpec::constant({-1.0, 0.0})});
  const int n = static_cast<int>(state.range(0));
  const MultiIndex nv{n, n};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(1.0, 2.0);
  std::vector<double> x(static_cast<std::size_t>(2 * n));
  for (auto& v : x) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(log_joint_density_unnormalized(ws, nv, x));
}
BENCHMARK(BM_JointDensity)->Arg(2)->Arg(4)->Arg(8);

static void BM_KernelBuild(benchmark::State& state) {
  const auto ws = build_angelesco({WeightSpec::constant({-1.0, 0.0}), WeightSpec::constant({0.0, 1.0})});
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(biorthogonalize(ws, MultiIndex{n, n}));
}
BENCHMARK(BM_KernelBuild)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_KernelEval(benchmark::State& state) {
  const auto ws = build_angelesco({WeightSpec::constant({-1.0, 0.0}), WeightSpec::constant({0.0, 1.0})});
  const Kernel k = biorthogonalize(ws, MultiIndex{4, 4});
  double x = -0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k(x, 0.3));
    x = x > 0.9 ? -0.9 : x + 0.01;
  }
}
BENCHMARK(BM_KernelEval);

static void BM_Sampler(benchmark::State& state) {
  const auto ws = build_angelesco({WeightSpec::constant({-1.0, 0.0}), WeightSpec::constant({0.0, 1.0})});
  SamplerConfig cfg;
  cfg.burn_in = 1000;
  cfg.samples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_mcmc(ws, MultiIndex{2, 2}, cfg));
}
BENCHMARK(BM_Sampler)->Arg(10000)->Unit(benchmark::kMillisecond);
