#include "hscale/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hscale::analysis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half).
constexpr double kGLx[8] = {0.0950125098376374, 0.2816035507792589,
                            0.4580167776572274, 0.6178762444026438,
                            0.7554044083550030, 0.8656312023878318,
                            0.9445750230732326, 0.9894009349916499};
constexpr double kGLw[8] = {0.1894506104550685, 0.1826034150449236,
                            0.1691565193950025, 0.1495959888165767,
                            0.1246289712555339, 0.0951585116824928,
                            0.0622535239386479, 0.0271524594117541};

double log_sum_exp(const double* v, size_t n) {
  double m = -kInf;
  for (size_t i = 0; i < n; ++i) m = std::max(m, v[i]);
  if (m == -kInf) return -kInf;
  double s = 0;
  for (size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log of ∫_a^b e^{L(u)} du by 16-point Gauss-Legendre.
double panel_log_mass(const std::function<double(double)>& L, double a,
                      double b) {
  const double half = (b - a) / 2, mid = (a + b) / 2;
  double terms[16];
  for (int i = 0; i < 8; ++i) {
    const double lw = std::log(kGLw[i] * half);
    terms[2 * i] = lw + L(mid + half * kGLx[i]);
    terms[2 * i + 1] = lw + L(mid - half * kGLx[i]);
  }
  const double m = log_sum_exp(terms, 16);
  if (std::isnan(m))
    throw std::overflow_error("improper integral: integrand evaluation failed");
  return m;
}

// Dyadic aggregation in the panel index: block m sums panels [2^m, 2^{m+1}).
std::vector<double> aggregate(const std::vector<double>& s) {
  std::vector<double> out;
  for (size_t m = 1; 2 * m <= s.size(); m *= 2)
    out.push_back(log_sum_exp(s.data() + m, m));
  return out;
}

struct Decision {
  VerdictKind kind;
  double tail_log;    // log of the extrapolated remaining tail
  double tail_ratio;  // last ratio at the deciding level
  int level;
  bool estimate_only = false;  // decided at an aggregated level
};

std::optional<Decision> decide(const std::vector<double>& log_panels) {
  std::vector<double> s = log_panels;
  for (int level = 0; level <= 3; ++level) {
    if (level > 0) s = aggregate(s);
    if (s.size() < 5) break;
    const size_t n = s.size();
    double d[3];
    for (int i = 0; i < 3; ++i) d[i] = s[n - 3 + i] - s[n - 4 + i];
    const double worst = std::max({d[0], d[1], d[2]});
    if (worst < std::log(0.9)) {
      const double r = std::exp(worst);
      // At aggregated levels the blocks may decay slower than geometrically
      // past the window (iterated-log tails), so the remainder is a
      // same-order estimate rather than a tight extrapolation.
      return Decision{VerdictKind::Converges,
                      s[n - 1] + std::log(r / (1 - r)), std::exp(d[2]), level,
                      level > 0};
    }
    // Aggregated blocks of a convergent integrand can still grow ~2x per
    // block while the block span is shorter than the start offset; genuine
    // divergence at an aggregated level settles to ratio ~1.
    const double growth_cap = level == 0 ? kInf : std::log(1.5);
    if (std::min({d[0], d[1], d[2]}) >= -1e-9 && worst <= growth_cap)
      return Decision{VerdictKind::Diverges, kInf, std::exp(d[2]), level, false};
  }
  return std::nullopt;
}

struct EngineResult {
  VerdictKind kind = VerdictKind::Inconclusive;
  double log_value = -kInf;  // log of value + extrapolated tail (Converges)
  double tail_ratio = 1.0;
  int octaves = 0;
  int level = 0;
  bool stabilized = true;
  bool tail_uncertain = false;
};

// Integrates ∫_{u0}^∞ e^{L(u)} du over octave panels of width log 2,
// growing the panel count in stages until a verdict resolves. A Diverges
// outcome must be re-confirmed at the next (16x larger) stage so that the
// warm-up growth of aggregated blocks cannot masquerade as divergence.
EngineResult run_engine(const std::function<double(double)>& L, double u0) {
  static constexpr int kStages[4] = {64, 1024, 16384, 65536};
  std::vector<double> logP;
  logP.reserve(kStages[3]);
  EngineResult out;
  bool provisional_diverges = false;
  int provisional_level = 0;
  double provisional_ratio = 1.0;
  for (int stage = 0; stage < 4; ++stage) {
    const int target = kStages[stage];
    while (static_cast<int>(logP.size()) < target) {
      const double a = u0 + kLn2 * static_cast<double>(logP.size());
      logP.push_back(panel_log_mass(L, a, a + kLn2));
    }
    const auto d = decide(logP);
    out.octaves = static_cast<int>(logP.size());
    if (!d) continue;
    if (d->kind == VerdictKind::Diverges) {
      out.kind = VerdictKind::Diverges;
      out.tail_ratio = d->tail_ratio;
      out.level = d->level;
      if (provisional_diverges || stage == 3) return out;
      provisional_diverges = true;
      provisional_level = d->level;
      provisional_ratio = d->tail_ratio;
      continue;
    }
    out.kind = d->kind;
    out.tail_ratio = d->tail_ratio;
    out.level = d->level;
    out.tail_uncertain = d->estimate_only;
    const double total = log_sum_exp(logP.data(), logP.size());
    out.log_value = log_add(total, d->tail_log);
    if (d->level > 0) return out;
    // level-0 geometric tail: require the extrapolated value to be stable
    // against dropping the last octave before accepting it.
    const double r_prev = std::exp(logP[logP.size() - 2] - logP[logP.size() - 3]);
    if (r_prev < 1) {
      const double total_prev = log_sum_exp(logP.data(), logP.size() - 1);
      const double v_prev = log_add(
          total_prev, logP[logP.size() - 2] + std::log(r_prev / (1 - r_prev)));
      if (std::abs(std::expm1(out.log_value - v_prev)) < 1e-6) return out;
    }
    out.stabilized = false;
    if (stage == 3) return out;
  }
  if (provisional_diverges) {
    out.kind = VerdictKind::Diverges;
    out.level = provisional_level;
    out.tail_ratio = provisional_ratio;
    out.stabilized = false;
    return out;
  }
  out.kind = VerdictKind::Inconclusive;
  out.log_value = -kInf;
  return out;
}

// log of ∫_{u0}^∞ e^{L(u)} du for an integral already known to converge.
// Super-blocks of 64 panels whose width doubles per block, so exponential,
// power, and iterated-log decays all resolve within a few thousand panels.
// The remainder beyond the last block is extrapolated from the block decay.
double log_tail_value(const std::function<double(double)>& L, double u0) {
  double total = -kInf;
  double a = u0;
  double width = kLn2;
  std::vector<double> blk;
  for (int j = 0; j < 64; ++j) {
    double p[64];
    for (int i = 0; i < 64; ++i) {
      p[i] = panel_log_mass(L, a, a + width);
      a += width;
    }
    width *= 2;
    blk.push_back(log_sum_exp(p, 64));
    total = log_add(total, blk.back());
    if (blk.size() < 3) continue;
    const size_t nb = blk.size();
    const double r1 = blk[nb - 1] - blk[nb - 2];
    const double r0 = blk[nb - 2] - blk[nb - 3];
    if (std::exp(r1) >= 0.9) continue;
    const bool negligible = blk[nb - 1] < total - 35;  // < 1e-15 of the sum
    if (negligible || std::abs(r1 - r0) < 0.02) {
      const double r = std::min(std::exp(std::max(r1, r0)), 0.95);
      return log_add(total, blk[nb - 1] + std::log(r / (1 - r)));
    }
  }
  // still not geometric in the doubling blocks: fit blocks ~ c * j^-p
  const size_t nb = blk.size();
  const double p_fit =
      (blk[nb - 2] - blk[nb - 1]) / (std::log(static_cast<double>(nb)) -
                                     std::log(static_cast<double>(nb - 1)));
  if (!(p_fit > 1.05))
    throw PreconditionError(
        "tail integral decays too slowly to extrapolate reliably");
  return log_add(total, blk[nb - 1] +
                            std::log(static_cast<double>(nb) / (p_fit - 1)));
}

Verdict finish(const EngineResult& r, double lower) {
  Verdict v;
  v.kind = r.kind;
  v.tail_ratio = r.tail_ratio;
  v.grid.lower = lower;
  v.grid.octaves = r.octaves;
  v.grid.level = r.level;
  const double log2_trunc =
      std::log2(lower) + static_cast<double>(r.octaves);
  v.truncation = std::exp2(std::min(log2_trunc, 1020.0));
  if (r.kind == VerdictKind::Converges) {
    v.value = std::exp(r.log_value);
    if (!r.stabilized)
      v.warnings.push_back("tail extrapolation did not stabilize to 1e-6");
    if (r.tail_uncertain)
      v.warnings.push_back(
          "slowly decaying tail: value is a same-order estimate");
  }
  return v;
}

}  // namespace

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Converges:
      return "converges";
    case VerdictKind::Diverges:
      return "diverges";
    case VerdictKind::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

Verdict improper_integral_log(const std::function<double(double)>& log_g,
                              double lower) {
  if (!(lower >= 1))
    throw std::invalid_argument("improper_integral_log: lower >= 1 required");
  return finish(run_engine(log_g, std::log(lower)), lower);
}

Verdict criterion_integral(const orfun::OrFunction& phi, int q, int n,
                           double lower) {
  if (q < 0 || n < 1)
    throw std::invalid_argument("criterion_integral: need q >= 0, n >= 1");
  if (!(lower >= 1))
    throw std::invalid_argument("criterion_integral: lower >= 1 required");
  const double p = 2 * q + n;
  auto L = [&phi, p](double u) { return p * u - 2 * phi.log_at(u); };
  return finish(run_engine(L, std::log(lower)), lower);
}

Verdict orlicz_integral(const orfun::OrFunction& phi) {
  auto L = [&phi](double u) { return -std::log(u) - 2 * phi.log_at(u); };
  Verdict v = finish(run_engine(L, std::log(2.0)), 2.0);
  // Monotonicity is a hypothesis of the criterion, not of the quadrature.
  const auto grid = orfun::log_grid(1.0, 1e6, 257);
  for (size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = phi.log_at(std::log(grid[i]));
    const double b = phi.log_at(std::log(grid[i + 1]));
    if (b < a - 1e-12) {
      v.warnings.push_back("phi is not nondecreasing on the check grid");
      break;
    }
  }
  return v;
}

RateFactorization rate_factorization(const orfun::OrFunction& phi, int q,
                                     int n, double eps) {
  if (!(eps > 0) || !(eps < 0.5))
    throw std::invalid_argument("rate_factorization: eps must lie in (0, 1/2)");
  Verdict head = criterion_integral(phi, q, n);
  if (head.kind != VerdictKind::Converges)
    throw PreconditionError(
        "rate_factorization: criterion integral did not converge (verdict " +
        std::string(to_string(head.kind)) + ")");

  const double p = 2 * q + n;
  auto L = [&phi, p](double u) { return p * u - 2 * phi.log_at(u); };

  // Tabulate eta(t) = ∫_t^∞ on knots linear in u = log t. The span doubles
  // until phi1 = eta^-eps exhibits tenfold growth (it is unbounded in the
  // limit, but the table has to witness that).
  const int knots = 257;
  double u_end = head.grid.octaves * kLn2;
  std::vector<double> lu(knots), leta(knots);
  double growth = 0;
  for (int attempt = 0; attempt < 12; ++attempt) {
    for (int i = 0; i < knots; ++i) lu[i] = u_end * i / (knots - 1);
    leta[knots - 1] = log_tail_value(L, u_end);
    for (int i = knots - 2; i >= 0; --i) {
      // split each knot interval into whole octaves for the quadrature
      const double a = lu[i], b = lu[i + 1];
      const int sub = std::max(1, static_cast<int>(std::ceil((b - a) / kLn2)));
      double seg = -kInf;
      for (int s = 0; s < sub; ++s)
        seg = log_add(seg, panel_log_mass(L, a + (b - a) * s / sub,
                                          a + (b - a) * (s + 1) / sub));
      leta[i] = log_add(leta[i + 1], seg);
    }
    growth = std::exp(eps * (leta[0] - leta[knots - 1]));
    if (growth > 10 || u_end >= 131072 * kLn2) break;
    u_end *= 2;
  }

  std::vector<double> lphi1(knots), lphi2(knots);
  for (int i = 0; i < knots; ++i) {
    lphi1[i] = -eps * leta[i];
    lphi2[i] = phi.log_at(lu[i]) + eps * leta[i];
  }
  RateFactorization out{
      orfun::OrFunction::tabulated_log(lu, lphi1),
      orfun::OrFunction::tabulated_log(lu, lphi2),
      orfun::OrFunction::tabulated_log(lu, leta),
      eps,
      growth,
      Verdict{},
      0.0,
      u_end};
  out.phi2_criterion = criterion_integral(out.phi2, q, n);
  double perr = 0;
  for (int i = 0; i < knots; ++i) {
    const double lp = out.phi1.log_at(lu[i]) + out.phi2.log_at(lu[i]);
    perr = std::max(perr, std::abs(std::expm1(lp - phi.log_at(lu[i]))));
  }
  out.product_error = perr;
  return out;
}

}  // namespace hscale::analysis
