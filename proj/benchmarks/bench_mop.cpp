#include <benchmark/benchmark.h>

#include <mopkit/mopkit.hpp>

using namespace mopkit;

static WeightSystem angelesco() {
  return build_angelesco({WeightSpec::constant({-1.0, 0.0}), WeightSpec::constant({0.0, 1.0})});
}

static WeightSystem nikishin() {
  return build_nikishin(WeightSpec::constant({1.0, 2.0}), {WeightSpec::constant({-1.0, 0.0})});
}

static void BM_MomentTableLegendre(benchmark::State& state) {
  const auto ws = angelesco();
  MomentOptions opt;
  opt.basis = MomentBasis::legendre;
  for (auto _ : state) benchmark::DoNotOptimize(moment_table(ws, static_cast<int>(state.range(0)), opt));
}
BENCHMARK(BM_MomentTableLegendre)->Arg(10)->Arg(30)->Arg(60);

static void BM_TypeII(benchmark::State& state) {
  const auto ws = angelesco();
  const int n = static_cast<int>(state.range(0));
  const MultiIndex nv{n, n};
  MomentOptions opt;
  opt.basis = MomentBasis::legendre;
  const auto mt = moment_table(ws, required_moment_order(nv), opt);
  for (auto _ : state) benchmark::DoNotOptimize(type2_mop(mt, nv));
}
BENCHMARK(BM_TypeII)->Arg(2)->Arg(5)->Arg(10)->Arg(15);

static void BM_Roots(benchmark::State& state) {
  const MultiIndex nv{15, 15};
  MomentOptions opt;
  opt.basis = MomentBasis::legendre;
  const auto p = type2_mop(moment_table(angelesco(), required_moment_order(nv), opt), nv).polynomial;
  for (auto _ : state) benchmark::DoNotOptimize(poly_roots(p));
}
BENCHMARK(BM_Roots);

static void BM_QuadTypeINikishin(benchmark::State& state) {
  const auto ws = nikishin();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(QuadTypeI::solve(ws, MultiIndex{n, n - 1}));
}
BENCHMARK(BM_QuadTypeINikishin)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
