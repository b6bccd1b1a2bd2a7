#include <benchmark/benchmark.h>

#include "hscale/analysis.hpp"
#include "hscale/dsl.hpp"

static void BM_CriterionPower(benchmark::State& state) {
  const auto phi = hscale::dsl::parse("pow:1");
  for (auto _ : state)
    benchmark::DoNotOptimize(hscale::analysis::criterion_integral(phi, 0, 1));
}
BENCHMARK(BM_CriterionPower);

static void BM_CriterionLogRefined(benchmark::State& state) {
  const auto phi = hscale::dsl::parse("mul(pow:0.5,logp:0.75)");
  for (auto _ : state)
    benchmark::DoNotOptimize(hscale::analysis::criterion_integral(phi, 0, 1));
}
BENCHMARK(BM_CriterionLogRefined);

static void BM_RateFactorization(benchmark::State& state) {
  const auto phi = hscale::dsl::parse("pow:1");
  for (auto _ : state)
    benchmark::DoNotOptimize(hscale::analysis::rate_factorization(phi, 0, 1, 0.25));
}
BENCHMARK(BM_RateFactorization);
