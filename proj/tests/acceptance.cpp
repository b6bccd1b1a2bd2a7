// Acceptance suite: one criterion per case, one PASS/FAIL line each, with
// the measured runtime against the budget. Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hscale/analysis.hpp"
#include "hscale/dsl.hpp"
#include "hscale/lab.hpp"
#include "hscale/orfun.hpp"
#include "hscale/samplers.hpp"
#include "hscale/spectral.hpp"
#include "hscale/torus.hpp"

using namespace hscale;
using orfun::OrFunction;
using orfun::PsiParameter;
using analysis::VerdictKind;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
  void note(const std::string& text) {
    if (ok) detail = text;
  }
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// 1. interpolation norm identity at N = 1e4
Outcome criterion1() {
  Outcome out;
  lab::Rng rng(lab::kDefaultSeed);
  const auto A = lab::sample_spectrum(rng, 10000, 1.0, 1e4);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto [phi0, phi1] = lab::sample_scale_pair(rng);
    const auto psi = lab::sample_psi(rng);
    const auto u = lab::sample_coeffs(rng, A.size());
    const auto [lhs, rhs] =
        spectral::interpolation_norm_identity(phi0, phi1, psi, A, u);
    if (rhs > 0) worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  out.require(worst <= 1e-12, "max relative gap " + fmt("%.3g", worst));
  out.note("max_rel_gap=" + fmt("%.3g", worst));
  return out;
}

// 2. round trip between the interpolation parameter and the composition
Outcome criterion2() {
  Outcome out;
  lab::Rng rng(17);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    double s = 0;
    const OrFunction f = lab::sample_or_function(rng, &s);
    const double s0 = s - rng.uniform(0.6, 1.4);
    const double s1 = s + rng.uniform(0.6, 1.4);
    const auto psi = orfun::make_interpolation_parameter(f, s0, s1);
    const auto back = orfun::compose_parameterized(OrFunction::power(s0),
                                                   OrFunction::power(s1), psi);
    for (double t : orfun::log_grid(1.0, 1e6, 64))
      worst = std::max(worst, std::abs(back(t) / f(t) - 1));
  }
  out.require(worst <= 1e-12, "max pointwise gap " + fmt("%.3g", worst));
  out.note("max_rel_gap=" + fmt("%.3g", worst));
  return out;
}

// 3. inequality suite (3b.3), (3b.9new), (3b.11 under certificate),
//    (3b.12), (3b.19): 1000+ samples each across 3 spectra
Outcome criterion3() {
  Outcome out;
  lab::Rng rng(lab::kDefaultSeed);
  double min_tau = 1e300, min_a = 1e300, min_b = 1e300, min_c = 1e300,
         min_op = 1e300;
  int n_tau = 0, n_a = 0, n_b = 0, n_c = 0, n_op = 0;

  for (int spectrum = 0; spectrum < 3; ++spectrum) {
    const auto A = lab::sample_spectrum(rng, 2000, 1.0, 1e3);
    const auto [phi0, phi1] = lab::sample_scale_pair(rng);
    const auto psi_gen = lab::sample_psi(rng);
    const PsiParameter psi_pow(OrFunction::power(rng.uniform(0.15, 0.85)));
    spectral::InterpolationFrame general(A, phi0, phi1, psi_gen);
    spectral::InterpolationFrame powered(A, phi0, phi1, psi_pow);
    for (int s = 0; s < 350; ++s) {
      const auto u = lab::sample_coeffs(rng, A.size());
      const double scale_g = general.norm_phi(u);
      const double tau = general.kappa() * std::exp(rng.uniform(0.0, 6.0));
      min_tau = std::min(min_tau, general.tau_slack(u, tau) / scale_g);
      ++n_tau;
      const auto stg = general.self_tuned(u);
      min_a = std::min(min_a, stg.slack_a / scale_g);
      ++n_a;
      if (stg.slack_b) {
        min_b = std::min(min_b, *stg.slack_b / scale_g);
        ++n_b;
      }
      const auto stp = powered.self_tuned(u);
      const double scale_p = powered.norm_phi(u);
      min_c = std::min(min_c, *stp.slack_c / scale_p);
      ++n_c;
    }

    const auto [eta0, eta1] = lab::sample_scale_pair(rng);
    for (int s = 0; s < 334; ++s) {
      spectral::DiagonalMap T;
      T.m.resize(A.size());
      for (auto& z : T.m) z = spectral::Complex(rng.normal(), rng.normal());
      const auto rec = spectral::operator_norm_interpolation(
          T, phi0, phi1, eta0, eta1, psi_gen, A);
      min_op = std::min(min_op, rec.slack / rec.norm_interp);
      ++n_op;
    }
  }
  out.require(n_tau >= 1000 && n_a >= 1000 && n_c >= 1000 && n_op >= 1000,
              "insufficient sample counts");
  out.require(min_tau >= -1e-10, "(3b.3) slack " + fmt("%.3g", min_tau));
  out.require(min_a >= -1e-10, "(3b.9new) slack " + fmt("%.3g", min_a));
  out.require(n_b == 0 || min_b >= -1e-10, "(3b.11) slack " + fmt("%.3g", min_b));
  out.require(min_c >= -1e-10, "(3b.12) slack " + fmt("%.3g", min_c));
  out.require(min_op >= -1e-10, "(3b.19) slack " + fmt("%.3g", min_op));
  out.note("min slacks: 3b.3=" + fmt("%.2g", min_tau) + " 9new=" +
           fmt("%.2g", min_a) + " 11=" + fmt("%.2g", n_b ? min_b : 0) +
           " 12=" + fmt("%.2g", min_c) + " 19=" + fmt("%.2g", min_op));
  return out;
}

// 4. criterion boundary and closed-form values
Outcome criterion4() {
  Outcome out;
  const std::pair<int, int> qn[] = {{0, 1}, {1, 2}, {0, 3}};
  for (const auto& [q, n] : qn) {
    const double b = q + n / 2.0;
    const auto above = analysis::criterion_integral(OrFunction::power(b + 0.1), q, n);
    out.require(above.kind == VerdictKind::Converges,
                "power above the boundary must converge");
    const auto at = analysis::criterion_integral(OrFunction::power(b), q, n);
    out.require(at.kind == VerdictKind::Diverges,
                "power at the boundary must diverge");
    const double s = b + 0.5;
    const auto v = analysis::criterion_integral(OrFunction::power(s), q, n);
    out.require(v.kind == VerdictKind::Converges, "closed-form case must converge");
    if (v.value) {
      const double expect = 1.0 / (2 * s - 2 * q - n);
      out.require(std::abs(*v.value - expect) <= 1e-4 * expect,
                  "closed-form value off: " + fmt("%.6g", *v.value));
    }
  }
  return out;
}

// 5. log-refined criteria
Outcome criterion5() {
  Outcome out;
  const auto refined = [](double rho) {
    return OrFunction::product(OrFunction::power(0.5),
                               OrFunction::logp(rho + 0.5));
  };
  const auto doubly = [](double rho) {
    return OrFunction::product(
        OrFunction::power(0.5),
        OrFunction::product(OrFunction::logp(0.5), OrFunction::loglogp(rho + 0.5)));
  };
  out.require(analysis::criterion_integral(refined(0.25), 0, 1).kind ==
                  VerdictKind::Converges,
              "log-refined rho=0.25 must converge");
  out.require(analysis::criterion_integral(refined(1.0), 0, 1).kind ==
                  VerdictKind::Converges,
              "log-refined rho=1 must converge");
  out.require(analysis::criterion_integral(doubly(0.5), 0, 1).kind ==
                  VerdictKind::Converges,
              "doubly-log rho=0.5 must converge");
  out.require(analysis::orlicz_integral(OrFunction::constant(1)).kind ==
                  VerdictKind::Diverges,
              "orlicz with phi = 1 must diverge");
  // the rho = 0 boundaries may be Inconclusive (documented); they must
  // never be reported convergent
  out.require(analysis::criterion_integral(refined(0.0), 0, 1).kind !=
                  VerdictKind::Converges,
              "log-refined rho=0 misreported as convergent");
  out.require(analysis::criterion_integral(doubly(0.0), 0, 1).kind !=
                  VerdictKind::Converges,
              "doubly-log rho=0 misreported as convergent");
  return out;
}

// 6. rate bound through the tail-integral factorization; c* stable in M
Outcome criterion6() {
  Outcome out;
  const auto fac = analysis::rate_factorization(OrFunction::power(1), 0, 1, 0.25);
  auto run = [&](int M) {
    const auto e = torus::EigenEnumeration::build(1, M);
    const auto f = torus::synthesize_field(
        1, M, torus::RadialDecay{OrFunction::power(1), 0.5}, e);
    std::vector<std::size_t> ks;
    for (std::size_t k = 16; k <= 2048; k *= 2) ks.push_back(k);
    return torus::rate_experiment(fac.phi1, fac.phi2, f, 0, ks);
  };
  const auto r1 = run(2048);
  const auto r2 = run(4096);
  out.require(std::isfinite(r1.c_star) && r1.c_star > 0, "c* not finite");
  for (const auto& row : r1.rows)
    out.require(row.error <= r1.c_star * row.bound * (1 + 1e-12),
                "ratio exceeds the fitted c*");
  const double drift = r2.c_star / r1.c_star;
  out.require(drift < 2.0 && drift > 0.5,
              "c* drift across doubling: " + fmt("%.3g", drift));
  out.note("c*=" + fmt("%.4g", r1.c_star) + " drift=" + fmt("%.3g", drift));
  return out;
}

// 7. unconditional convergence protocol at the critical-order log weight
Outcome criterion7() {
  Outcome out;
  const auto phi = OrFunction::product(OrFunction::power(0.5), OrFunction::logp(1));
  const auto e = torus::EigenEnumeration::build(1, 1024);
  const auto f = torus::synthesize_field(1, 1024, torus::RadialDecay{phi, 1.0}, e);
  const auto res =
      torus::unconditional_probe(f, phi, 0, 20, lab::kDefaultSeed, {1e-3});
  out.require(res.k_at_level.size() == 21, "expected 21 orderings");
  std::int64_t worst_k = 0;
  for (const auto& row : res.k_at_level) {
    out.require(row[0] >= 1, "an ordering failed to reach 1e-3");
    worst_k = std::max(worst_k, row[0]);
  }
  out.note("worst k to reach 1e-3: " + std::to_string(worst_k) + " of " +
           std::to_string(e.total()));
  return out;
}

// 8. Menshov-Rademacher / Orlicz diagnostics
Outcome criterion8() {
  Outcome out;
  const auto logstar = OrFunction::logstar();

  // fitted c in ||S*|| <= c ||f||_log* over 20 random unit-ball fields,
  // stable to < 2x across M in {256, 512, 1024}
  double c_by_m[3] = {0, 0, 0};
  const int ms[3] = {256, 512, 1024};
  for (int mi = 0; mi < 3; ++mi) {
    const auto e = torus::EigenEnumeration::build(1, ms[mi]);
    for (int i = 0; i < 20; ++i) {
      const auto f = torus::synthesize_field(
          1, ms[mi],
          torus::RandomInBall{logstar, static_cast<std::uint64_t>(1000 + i), 1.0},
          e);
      const auto d = torus::ae_diagnostics(f, logstar);
      out.require(std::isfinite(d.fitted_c), "fitted c not finite");
      c_by_m[mi] = std::max(c_by_m[mi], d.fitted_c);
    }
  }
  const double lo = std::min({c_by_m[0], c_by_m[1], c_by_m[2]});
  const double hi = std::max({c_by_m[0], c_by_m[1], c_by_m[2]});
  out.require(hi / lo < 2.0, "fitted c drift " + fmt("%.3g", hi / lo));

  // condition series with omega = log*^2: measurable growth over 1e6 terms
  const auto series = torus::orlicz_condition_series(logstar, 1, 1000000);
  out.require(series.strictly_increasing,
              "condition-series partials not increasing");
  out.require(series.last_doubling_growth > 1e-6,
              "condition series plateaued: growth " +
                  fmt("%.3g", series.last_doubling_growth));

  // the weighted sum stays bounded for a constructed field across doublings
  double w_by_m[3] = {0, 0, 0};
  for (int mi = 0; mi < 3; ++mi) {
    const auto e = torus::EigenEnumeration::build(1, ms[mi]);
    const auto f =
        torus::synthesize_field(1, ms[mi], torus::RadialDecay{logstar, 1.0}, e);
    w_by_m[mi] = torus::ae_diagnostics(f, logstar).orlicz_weighted;
  }
  out.require(w_by_m[2] / w_by_m[0] < 1.05,
              "weighted sum grew " + fmt("%.3g", w_by_m[2] / w_by_m[0]) + "x");
  out.note("c_max=" + fmt("%.3g", hi) + " c_drift=" + fmt("%.3g", hi / lo) +
           " series_growth=" + fmt("%.2g", series.last_doubling_growth) +
           " weighted_drift=" + fmt("%.3g", w_by_m[2] / w_by_m[0]));
  return out;
}

// 9. Matuszewska indices
Outcome criterion9() {
  Outcome out;
  for (double s : {-2.0, 0.0, 0.5, 3.0}) {
    const auto e = orfun::matuszewska_indices(OrFunction::power(s));
    out.require(std::abs(e.sigma0 - s) <= 0.05 && std::abs(e.sigma1 - s) <= 0.05,
                "power " + fmt("%.1f", s) + " estimate off");
  }
  const auto mix = orfun::matuszewska_indices(
      OrFunction::product(OrFunction::power(1), OrFunction::logp(3)));
  out.require(std::abs(mix.sigma0 - 1) <= 0.05 && std::abs(mix.sigma1 - 1) <= 0.05,
              "t log^3 estimate off: " + fmt("%.4f", mix.sigma1));
  const auto ls = orfun::matuszewska_indices(OrFunction::logstar());
  out.require(std::abs(ls.sigma0) <= 0.05 && std::abs(ls.sigma1) <= 0.05,
              "log* estimate off");
  return out;
}

// 10. Weyl enumeration regression brackets
Outcome criterion10() {
  Outcome out;
  struct Frozen {
    int n;
    double lo, hi;
  } frozen[] = {
      {1, 0.447213595499958, 0.707106781186548},
      {2, 0.534522483824849, 1.000000000000000},
      {3, 0.611487166884869, 1.122462048309373},
  };
  for (const auto& fz : frozen)
    for (int M : {8, 16, 32}) {
      const auto b = torus::EigenEnumeration::build(fz.n, M).weyl_bracket();
      out.require(b.lo >= fz.lo - 1e-12 && b.hi <= fz.hi + 1e-12,
                  "bracket escaped for n=" + std::to_string(fz.n));
    }
  return out;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const Entry entries[] = {
      {1, "interpolation-norm-identity", 5, criterion1},
      {2, "parameter-composition-round-trip", 1, criterion2},
      {3, "interpolational-inequality-suite", 30, criterion3},
      {4, "criterion-boundary-and-values", 5, criterion4},
      {5, "log-refined-criteria", 10, criterion5},
      {6, "rate-bound-with-factorization", 60, criterion6},
      {7, "unconditional-convergence", 60, criterion7},
      {8, "majorant-and-orlicz-diagnostics", 120, criterion8},
      {9, "matuszewska-indices", 5, criterion9},
      {10, "weyl-enumeration-brackets", 1, criterion10},
  };
  int failures = 0;
  for (const auto& e : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = e.run();
    } catch (const std::exception& ex) {
      out.ok = false;
      out.detail = std::string("exception: ") + ex.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool in_budget = secs <= e.budget_s;
    const bool pass = out.ok && in_budget;
    failures += pass ? 0 : 1;
    std::printf("%s [%2d] %-36s %6.2fs/%-4.0fs %s\n", pass ? "PASS" : "FAIL",
                e.id, e.name, secs, e.budget_s,
                out.detail.empty()
                    ? ""
                    : (!out.ok ? out.detail : out.detail).c_str());
    if (out.ok && !in_budget)
      std::printf("     [%2d] over budget\n", e.id);
    std::fflush(stdout);
  }
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures;
}
