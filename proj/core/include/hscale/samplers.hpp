#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "hscale/lab.hpp"
#include "hscale/orfun.hpp"
#include "hscale/spectral.hpp"

namespace hscale::lab {

/// Combinator with a known power order s plus a slowly varying factor.
inline orfun::OrFunction sample_or_function(Rng& rng, double* order = nullptr) {
  using orfun::OrFunction;
  const double s = rng.uniform(-2.0, 3.0);
  if (order) *order = s;
  OrFunction f = OrFunction::power(s);
  switch (rng.next_u64() % 4) {
    case 0:
      return f;
    case 1:
      return OrFunction::product(f, OrFunction::logp(rng.uniform(0.5, 3.0)));
    case 2:
      return OrFunction::quotient(f, OrFunction::logp(rng.uniform(0.5, 2.0)));
    default:
      return OrFunction::product(f, OrFunction::loglogp(rng.uniform(0.5, 2.0)));
  }
}

/// (phi0, phi1) with phi0/phi1 bounded: phi1 = phi0 * growing factor.
inline std::pair<orfun::OrFunction, orfun::OrFunction> sample_scale_pair(
    Rng& rng) {
  using orfun::OrFunction;
  OrFunction phi0 = sample_or_function(rng);
  const double gap = rng.uniform(0.4, 2.0);
  OrFunction growth = rng.next_u64() % 2 == 0
                          ? OrFunction::power(gap)
                          : OrFunction::product(
                                OrFunction::power(gap),
                                OrFunction::logp(rng.uniform(0.5, 1.5)));
  return {phi0, OrFunction::product(phi0, growth)};
}

/// Pseudoconcave interpolation parameter: a plain power, a logarithmic
/// parameter, or one built by the two-exponent construction from a
/// combinator.
inline orfun::PsiParameter sample_psi(Rng& rng) {
  using orfun::OrFunction;
  using orfun::PsiParameter;
  switch (rng.next_u64() % 3) {
    case 0:
      return PsiParameter(OrFunction::power(rng.uniform(0.1, 0.9)));
    case 1:
      return PsiParameter(OrFunction::logp(rng.uniform(0.5, 2.0)));
    default: {
      double s = 0;
      OrFunction f = sample_or_function(rng, &s);
      const double lo = s - rng.uniform(0.5, 1.5);
      const double hi = s + rng.uniform(0.5, 1.5);
      return orfun::make_interpolation_parameter(f, lo, hi);
    }
  }
}

inline spectral::SpectralOperator sample_spectrum(Rng& rng, std::size_t n,
                                                  double lo, double hi) {
  std::vector<double> lam(n);
  for (auto& l : lam) l = rng.log_uniform(lo, hi);
  std::sort(lam.begin(), lam.end());
  if (!lam.empty()) lam.front() = std::max(lam.front(), lo);
  return spectral::SpectralOperator(std::move(lam));
}

inline spectral::CoeffVector sample_coeffs(Rng& rng, std::size_t n) {
  spectral::CoeffVector u;
  u.c.resize(n);
  for (auto& z : u.c) z = spectral::Complex(rng.normal(), rng.normal());
  return u;
}

}  // namespace hscale::lab
