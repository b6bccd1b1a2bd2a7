#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hscale/orfun.hpp"

namespace hscale::analysis {

enum class VerdictKind { Converges, Diverges, Inconclusive };

const char* to_string(VerdictKind k);

struct QuadGridSpec {
  double lower = 1.0;        // lower integration limit
  int octaves = 0;           // dyadic panels actually evaluated
  int points_per_octave = 16;
  int level = 0;             // aggregation depth that resolved the verdict
};

/// Three-state outcome of an improper-integral criterion. Inconclusive is a
/// legitimate result, not an error.
struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::optional<double> value;  // present iff Converges
  double tail_ratio = 1.0;      // last panel/block ratio at the deciding level
  double truncation = 0;        // upper limit reached (saturates near 2^1023)
  QuadGridSpec grid;
  std::vector<std::string> warnings;
};

/// Decides ∫_lower^∞ e^{log_g(u)} du with u = log t already substituted.
/// Dyadic panels (octaves in t), Gauss-Legendre per panel, log-sum-exp panel
/// masses, and ratio tests applied to dyadically aggregated panel sequences
/// so that slowly decaying (log-type) tails still resolve.
Verdict improper_integral_log(const std::function<double(double)>& log_g,
                              double lower);

/// Criterion integral ∫_lower^∞ t^{2q+n-1} / phi^2(t) dt.
Verdict criterion_integral(const orfun::OrFunction& phi, int q, int n,
                           double lower = 1.0);

/// Orlicz-type integral ∫_2^∞ dt / (t log t phi^2(t)). Grid monotonicity of
/// phi is checked and reported as a warning, never an error.
Verdict orlicz_integral(const orfun::OrFunction& phi);

/// phi = phi1 * phi2 with phi1 = eta^-eps unbounded and phi2 = phi * eta^eps
/// passing the criterion, eta the tabulated tail integral.
struct RateFactorization {
  orfun::OrFunction phi1;
  orfun::OrFunction phi2;
  orfun::OrFunction eta;
  double epsilon = 0;
  double phi1_growth = 0;       // phi1(t_max)/phi1(1), should exceed 10
  Verdict phi2_criterion;       // re-checked criterion integral
  double product_error = 0;     // max |phi1*phi2/phi - 1| at the knots
  double knot_log_t_max = 0;    // last eta knot, in log t
};

RateFactorization rate_factorization(const orfun::OrFunction& phi, int q,
                                     int n, double eps);

}  // namespace hscale::analysis
