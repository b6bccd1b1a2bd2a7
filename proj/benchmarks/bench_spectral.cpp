#include <benchmark/benchmark.h>

#include "hscale/samplers.hpp"
#include "hscale/spectral.hpp"

using namespace hscale;

static void BM_NormIdentity(benchmark::State& state) {
  lab::Rng rng(1);
  const auto A = lab::sample_spectrum(rng, static_cast<std::size_t>(state.range(0)), 1.0, 1e4);
  const auto phi0 = orfun::OrFunction::power(0);
  const auto phi1 = orfun::OrFunction::power(2);
  const orfun::PsiParameter psi(orfun::OrFunction::power(0.5));
  const auto u = lab::sample_coeffs(rng, A.size());
  for (auto _ : state)
    benchmark::DoNotOptimize(
        spectral::interpolation_norm_identity(phi0, phi1, psi, A, u));
}
BENCHMARK(BM_NormIdentity)->Arg(1000)->Arg(10000);

static void BM_SelfTunedSweep(benchmark::State& state) {
  lab::Rng rng(2);
  const auto A = lab::sample_spectrum(rng, 2000, 1.0, 1e3);
  spectral::InterpolationFrame frame(A, orfun::OrFunction::power(0),
                                     orfun::OrFunction::power(2),
                                     orfun::PsiParameter(orfun::OrFunction::power(0.5)));
  const auto u = lab::sample_coeffs(rng, A.size());
  for (auto _ : state) benchmark::DoNotOptimize(frame.self_tuned(u));
}
BENCHMARK(BM_SelfTunedSweep);
