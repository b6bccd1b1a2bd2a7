#include <benchmark/benchmark.h>

#include "hscale/torus.hpp"

using namespace hscale;
using torus::EigenEnumeration;

static void BM_Enumeration(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(EigenEnumeration::build(static_cast<int>(state.range(0)), 32));
}
BENCHMARK(BM_Enumeration)->Arg(1)->Arg(2)->Arg(3);

static void BM_SampleGrid(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const auto e = EigenEnumeration::build(1, M);
  const auto f = torus::synthesize_field(
      1, M, torus::RadialDecay{orfun::OrFunction::power(1), 0.5}, e);
  for (auto _ : state)
    benchmark::DoNotOptimize(torus::sample_grid(f, 4 * M + 1));
}
BENCHMARK(BM_SampleGrid)->Arg(256)->Arg(1024);

static void BM_SupError(benchmark::State& state) {
  const int M = 256;
  const auto e = EigenEnumeration::build(1, M);
  const auto f = torus::synthesize_field(
      1, M, torus::RadialDecay{orfun::OrFunction::power(1), 0.5}, e);
  const auto g = torus::partial_sum(f, e.total() / 2, e);
  for (auto _ : state)
    benchmark::DoNotOptimize(torus::sup_error(f, g, 0, 4 * M + 1));
}
BENCHMARK(BM_SupError);
