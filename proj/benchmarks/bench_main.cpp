#include <benchmark/benchmark.h>

#include "htq/dist.hpp"
#include "htq/mlf.hpp"
#include "htq/sim.hpp"

using namespace htq;

static void BM_ParetoSample(benchmark::State& st) {
  auto rv = HeavyTailRV::pareto(1.0, 1.5);
  Stream s(1, 0);
  for (auto _ : st) benchmark::DoNotOptimize(rv.sample(s));
}
BENCHMARK(BM_ParetoSample);

static void BM_ResidualSample(benchmark::State& st) {
  auto r = residual(HeavyTailRV::pareto(1.0, 1.5));
  Stream s(1, 0);
  for (auto _ : st) benchmark::DoNotOptimize(r.sample(s));
}
BENCHMARK(BM_ResidualSample);

static void BM_StableSample(benchmark::State& st) {
  Stream s(1, 0);
  double a = st.range(0) / 10.0;
  for (auto _ : st) benchmark::DoNotOptimize(sample_positive_stable(a, s));
}
BENCHMARK(BM_StableSample)->Arg(3)->Arg(5)->Arg(9);

static void BM_MlSample(benchmark::State& st) {
  MittagLeffler ml(0.5);
  Stream s(1, 0);
  for (auto _ : st) benchmark::DoNotOptimize(ml.sample(s));
}
BENCHMARK(BM_MlSample);

// x in the double-series, quad-series and asymptotic regimes
static void BM_MlCdf(benchmark::State& st) {
  MittagLeffler ml(0.5);
  double x = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(ml.cdf(x));
}
BENCHMARK(BM_MlCdf)->Arg(2)->Arg(16)->Arg(100);

static void BM_PkExact(benchmark::State& st) {
  Mg1SpeedSpec spec{0.7 / 3.0, 1.0, HeavyTailRV::pareto(1.0, 1.5)};
  for (auto _ : st) benchmark::DoNotOptimize(pk_exact_sample(spec, static_cast<std::size_t>(st.range(0)), 7));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_PkExact)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

static void BM_LstNumeric(benchmark::State& st) {
  auto r = residual(HeavyTailRV::pareto(1.0, 1.5));
  double w = std::pow(10.0, -static_cast<double>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(lst_numeric(r, w));
}
BENCHMARK(BM_LstNumeric)->Arg(1)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
