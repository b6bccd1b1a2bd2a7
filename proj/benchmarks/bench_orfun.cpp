#include <benchmark/benchmark.h>

#include "hscale/dsl.hpp"
#include "hscale/orfun.hpp"

using hscale::orfun::OrFunction;

static void BM_EvalCombinator(benchmark::State& state) {
  const auto f = hscale::dsl::parse("mul(pow:1.5,mul(logp:2,loglogp:0.5))");
  double t = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.log_at(t));
    t += 0.37;
    if (t > 40) t = 1.0;
  }
}
BENCHMARK(BM_EvalCombinator);

static void BM_MatuszewskaIndices(benchmark::State& state) {
  const auto f = hscale::dsl::parse("mul(pow:1,logp:3)");
  for (auto _ : state)
    benchmark::DoNotOptimize(hscale::orfun::matuszewska_indices(f));
}
BENCHMARK(BM_MatuszewskaIndices);

static void BM_PseudoconcavityConstant(benchmark::State& state) {
  const auto psi =
      hscale::orfun::make_interpolation_parameter(hscale::dsl::parse("logp:1"), 0, 1);
  const auto grid =
      hscale::orfun::log_grid(1.0, 1e6, static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(hscale::orfun::pseudoconcavity_constant(psi, grid));
}
BENCHMARK(BM_PseudoconcavityConstant)->Arg(512)->Arg(4096);
