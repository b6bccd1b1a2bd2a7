#include "hscale/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hscale/lab.hpp"

namespace hscale::torus {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

struct GridGeometry {
  int n, G;
  std::size_t points;
  std::vector<Complex> phase;  // exp(2 pi i r / G)

  GridGeometry(int n_, int G_) : n(n_), G(G_), points(ipow(G_, n_)) {
    phase.resize(static_cast<std::size_t>(G));
    for (int r = 0; r < G; ++r)
      phase[static_cast<std::size_t>(r)] =
          Complex(std::cos(kTwoPi * r / G), std::sin(kTwoPi * r / G));
  }
};

// Visits every grid point with the phase index r = (k . g) mod G.
template <typename F>
void for_each_phase(const GridGeometry& gg, const Mode& k, F&& fn) {
  const int G = gg.G;
  int kk[3];
  for (int a = 0; a < 3; ++a) kk[a] = ((k[a] % G) + G) % G;
  if (gg.n == 1) {
    int r = 0;
    for (int g = 0; g < G; ++g) {
      fn(static_cast<std::size_t>(g), r);
      r += kk[0];
      if (r >= G) r -= G;
    }
  } else if (gg.n == 2) {
    std::size_t p = 0;
    int r0 = 0;
    for (int g0 = 0; g0 < G; ++g0) {
      int r = r0;
      for (int g1 = 0; g1 < G; ++g1) {
        fn(p++, r);
        r += kk[1];
        if (r >= G) r -= G;
      }
      r0 += kk[0];
      if (r0 >= G) r0 -= G;
    }
  } else {
    std::size_t p = 0;
    int r0 = 0;
    for (int g0 = 0; g0 < G; ++g0) {
      int r1 = r0;
      for (int g1 = 0; g1 < G; ++g1) {
        int r = r1;
        for (int g2 = 0; g2 < G; ++g2) {
          fn(p++, r);
          r += kk[2];
          if (r >= G) r -= G;
        }
        r1 += kk[1];
        if (r1 >= G) r1 -= G;
      }
      r0 += kk[0];
      if (r0 >= G) r0 -= G;
    }
  }
}

std::vector<Mode> derivative_multi_indices(int n, int q) {
  std::vector<Mode> out;
  for (int a0 = 0; a0 <= q; ++a0) {
    if (n == 1) {
      out.push_back({a0, 0, 0});
      continue;
    }
    for (int a1 = 0; a0 + a1 <= q; ++a1) {
      if (n == 2) {
        out.push_back({a0, a1, 0});
        continue;
      }
      for (int a2 = 0; a0 + a1 + a2 <= q; ++a2) out.push_back({a0, a1, a2});
    }
  }
  return out;
}

Complex derivative_factor(const Mode& k, const Mode& alpha) {
  Complex f(1, 0);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < alpha[a]; ++i) f *= Complex(0, k[a]);
  return f;
}

int default_grid(int M, int grid_per_axis) {
  return grid_per_axis > 0 ? grid_per_axis : 4 * M + 1;
}

void check_grid(int M, int G) {
  if (G < 2 * M + 1)
    throw std::invalid_argument(
        "grid_per_axis below 2M+1 aliases the coefficient cube");
}

// diff_alpha(x) = d^alpha (f - S_k)(x) for all |alpha| <= q, updated as
// modes move into the partial sum.
class SumTracker {
 public:
  SumTracker(const TorusField& f, const EigenEnumeration& e, int q, int G)
      : gg_(f.dim(), G), e_(e), f_(f) {
    alphas_ = derivative_multi_indices(f.dim(), q);
    diff_.assign(alphas_.size(), std::vector<Complex>(gg_.points, Complex()));
    for (std::size_t j = 0; j < e.total(); ++j) {
      const Complex c = f.coeffs()[static_cast<std::size_t>(e.flat[j])];
      if (c == Complex(0, 0)) continue;
      for (std::size_t a = 0; a < alphas_.size(); ++a) {
        const Complex coef = c * derivative_factor(e.modes[j], alphas_[a]);
        auto& d = diff_[a];
        for_each_phase(gg_, e.modes[j], [&](std::size_t p, int r) {
          d[p] += coef * gg_.phase[static_cast<std::size_t>(r)];
        });
      }
    }
  }

  // moves enumeration position j into the partial sum
  void cover(std::size_t j) {
    const Complex c = f_.coeffs()[static_cast<std::size_t>(e_.flat[j])];
    if (c == Complex(0, 0)) return;
    for (std::size_t a = 0; a < alphas_.size(); ++a) {
      const Complex coef = c * derivative_factor(e_.modes[j], alphas_[a]);
      auto& d = diff_[a];
      for_each_phase(gg_, e_.modes[j], [&](std::size_t p, int r) {
        d[p] -= coef * gg_.phase[static_cast<std::size_t>(r)];
      });
    }
  }

  double cq_error() const {
    double total = 0;
    for (const auto& d : diff_) {
      double m = 0;
      for (const Complex& v : d) m = std::max(m, std::abs(v));
      total += m;
    }
    return total;
  }

 private:
  GridGeometry gg_;
  const EigenEnumeration& e_;
  const TorusField& f_;
  std::vector<Mode> alphas_;
  std::vector<std::vector<Complex>> diff_;
};

}  // namespace

EigenEnumeration EigenEnumeration::build(int n, int M) {
  if (n < 1 || n > 3)
    throw std::invalid_argument("EigenEnumeration: n must be 1, 2, or 3");
  if (M < 1) throw std::invalid_argument("EigenEnumeration: M >= 1 required");
  EigenEnumeration e;
  e.n = n;
  e.M = M;
  const std::size_t total = ipow(static_cast<std::size_t>(2 * M + 1), n);
  e.modes.reserve(total);
  Mode k{0, 0, 0};
  const auto push_all = [&](auto&& self, int axis) -> void {
    if (axis == n) {
      e.modes.push_back(k);
      return;
    }
    for (int v = -M; v <= M; ++v) {
      k[static_cast<std::size_t>(axis)] = v;
      self(self, axis + 1);
    }
  };
  push_all(push_all, 0);
  std::sort(e.modes.begin(), e.modes.end(), [](const Mode& a, const Mode& b) {
    long long na = 0, nb = 0;
    for (int i = 0; i < 3; ++i) {
      na += static_cast<long long>(a[i]) * a[i];
      nb += static_cast<long long>(b[i]) * b[i];
    }
    if (na != nb) return na < nb;
    return a < b;  // deterministic tie-break, lexicographic ascending
  });
  e.nu.resize(e.modes.size());
  e.flat.resize(e.modes.size());
  TorusField probe(n, M);
  for (std::size_t j = 0; j < e.modes.size(); ++j) {
    long long s = 0;
    for (int i = 0; i < 3; ++i)
      s += static_cast<long long>(e.modes[j][i]) * e.modes[j][i];
    e.nu[j] = std::sqrt(1.0 + static_cast<double>(s));
    e.flat[j] = static_cast<std::int64_t>(probe.flat_index(e.modes[j]));
  }
  return e;
}

EigenEnumeration::WeylBracket EigenEnumeration::weyl_bracket() const {
  WeylBracket b{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t j = 1; j < nu.size(); ++j) {
    const double r = nu[j] / std::pow(static_cast<double>(j + 1), 1.0 / n);
    b.lo = std::min(b.lo, r);
    b.hi = std::max(b.hi, r);
  }
  return b;
}

TorusField::TorusField(int n, int M) : n_(n), M_(M) {
  if (n < 1 || n > 3) throw std::invalid_argument("TorusField: n must be 1..3");
  if (M < 1) throw std::invalid_argument("TorusField: M >= 1 required");
  c_.assign(ipow(static_cast<std::size_t>(2 * M + 1), n), Complex());
}

std::size_t TorusField::flat_index(const Mode& k) const {
  std::size_t idx = 0;
  for (int a = 0; a < n_; ++a) {
    if (k[static_cast<std::size_t>(a)] < -M_ || k[static_cast<std::size_t>(a)] > M_)
      throw std::out_of_range("TorusField: mode outside the cube");
    idx = idx * static_cast<std::size_t>(2 * M_ + 1) +
          static_cast<std::size_t>(k[static_cast<std::size_t>(a)] + M_);
  }
  for (int a = n_; a < 3; ++a)
    if (k[static_cast<std::size_t>(a)] != 0)
      throw std::out_of_range("TorusField: unused axis must be 0");
  return idx;
}

TorusField synthesize_field(int n, int M, const Profile& profile,
                            const EigenEnumeration& e) {
  TorusField f(n, M);
  if (const auto* sm = std::get_if<SingleMode>(&profile)) {
    f.set_mode(sm->k, sm->c);
    return f;
  }
  if (const auto* rd = std::get_if<RadialDecay>(&profile)) {
    if (!(rd->delta > 0))
      throw std::invalid_argument("radial_decay: delta > 0 required");
    for (std::size_t j = 0; j < e.total(); ++j) {
      const double lv = -rd->phi.log_at(std::log(e.nu[j])) -
                        0.5 * (1 + rd->delta) * std::log(static_cast<double>(j + 1));
      f.coeffs()[static_cast<std::size_t>(e.flat[j])] = std::exp(lv);
    }
    return f;
  }
  const auto& rb = std::get<RandomInBall>(profile);
  if (!(rb.radius > 0))
    throw std::invalid_argument("random_in_ball: radius > 0 required");
  lab::Rng rng(rb.seed);
  for (std::size_t j = 0; j < e.total(); ++j) {
    const double damp =
        std::exp(-rb.phi.log_at(std::log(e.nu[j])) -
                 0.5 * (1 + rb.envelope) * std::log(static_cast<double>(j + 1)));
    f.coeffs()[static_cast<std::size_t>(e.flat[j])] =
        Complex(rng.normal(), rng.normal()) * damp;
  }
  const double nrm = field_norm(f, rb.phi, spectral::NormScheme::Eigen, e);
  const double scale = rb.radius / nrm;
  for (auto& c : f.coeffs()) c *= scale;
  return f;
}

TorusField synthesize_field(int n, int M, const Profile& profile) {
  return synthesize_field(n, M, profile, EigenEnumeration::build(n, M));
}

double field_norm(const TorusField& f, const orfun::OrFunction& phi,
                  spectral::NormScheme scheme, const EigenEnumeration& e) {
  if (e.n != f.dim() || e.M != f.cutoff())
    throw std::invalid_argument("field_norm: enumeration mismatch");
  double sum = 0, comp = 0;
  for (std::size_t j = 0; j < e.total(); ++j) {
    const double arg = scheme == spectral::NormScheme::Eigen
                           ? std::log(e.nu[j])
                           : std::log(static_cast<double>(j + 1)) / e.n;
    const double w = std::exp(phi.log_at(arg));
    const double term =
        w * w * std::norm(f.coeffs()[static_cast<std::size_t>(e.flat[j])]);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return std::sqrt(sum);
}

double field_norm(const TorusField& f, const orfun::OrFunction& phi,
                  spectral::NormScheme scheme) {
  return field_norm(f, phi, scheme,
                    EigenEnumeration::build(f.dim(), f.cutoff()));
}

TorusField partial_sum(const TorusField& f, std::size_t count,
                       const EigenEnumeration& e,
                       const std::vector<std::int32_t>* perm) {
  if (e.n != f.dim() || e.M != f.cutoff())
    throw std::invalid_argument("partial_sum: enumeration mismatch");
  if (count > e.total())
    throw std::out_of_range("partial_sum: count exceeds the mode total");
  if (perm && perm->size() != e.total())
    throw std::invalid_argument("partial_sum: permutation length mismatch");
  TorusField out(f.dim(), f.cutoff());
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t pos =
        perm ? static_cast<std::size_t>((*perm)[i]) : i;
    const auto idx = static_cast<std::size_t>(e.flat.at(pos));
    out.coeffs()[idx] = f.coeffs()[idx];
  }
  return out;
}

std::vector<Complex> sample_grid(const TorusField& f, int grid_per_axis) {
  check_grid(f.cutoff(), grid_per_axis);
  GridGeometry gg(f.dim(), grid_per_axis);
  std::vector<Complex> out(gg.points, Complex());
  const EigenEnumeration e = EigenEnumeration::build(f.dim(), f.cutoff());
  for (std::size_t j = 0; j < e.total(); ++j) {
    const Complex c = f.coeffs()[static_cast<std::size_t>(e.flat[j])];
    if (c == Complex(0, 0)) continue;
    for_each_phase(gg, e.modes[j], [&](std::size_t p, int r) {
      out[p] += c * gg.phase[static_cast<std::size_t>(r)];
    });
  }
  return out;
}

TorusField coefficients_from_samples(const std::vector<Complex>& samples,
                                     int n, int M, int grid_per_axis) {
  check_grid(M, grid_per_axis);
  GridGeometry gg(n, grid_per_axis);
  if (samples.size() != gg.points)
    throw std::invalid_argument("coefficients_from_samples: sample count");
  TorusField f(n, M);
  const EigenEnumeration e = EigenEnumeration::build(n, M);
  const double scale = 1.0 / static_cast<double>(gg.points);
  for (std::size_t j = 0; j < e.total(); ++j) {
    Mode neg = e.modes[j];
    for (auto& v : neg) v = -v;
    Complex acc(0, 0);
    for_each_phase(gg, neg, [&](std::size_t p, int r) {
      acc += samples[p] * gg.phase[static_cast<std::size_t>(r)];
    });
    f.coeffs()[static_cast<std::size_t>(e.flat[j])] = acc * scale;
  }
  return f;
}

double sup_error(const TorusField& f, const TorusField& g, int q,
                 int grid_per_axis) {
  if (f.dim() != g.dim() || f.cutoff() != g.cutoff())
    throw std::invalid_argument("sup_error: field shape mismatch");
  if (q < 0) throw std::invalid_argument("sup_error: q >= 0 required");
  check_grid(f.cutoff(), grid_per_axis);
  TorusField d(f.dim(), f.cutoff());
  for (std::size_t i = 0; i < d.total(); ++i)
    d.coeffs()[i] = f.coeffs()[i] - g.coeffs()[i];
  const EigenEnumeration e = EigenEnumeration::build(f.dim(), f.cutoff());
  SumTracker tracker(d, e, q, grid_per_axis);
  return tracker.cq_error();
}

RateResult rate_experiment(const orfun::OrFunction& phi1,
                           const orfun::OrFunction& phi2, const TorusField& f,
                           int q, const std::vector<std::size_t>& ks,
                           int grid_per_axis) {
  const int n = f.dim();
  const int G = default_grid(f.cutoff(), grid_per_axis);
  check_grid(f.cutoff(), G);

  // certificates: phi2 passes the criterion, phi1 is grid-unbounded
  const auto v2 = analysis::criterion_integral(phi2, q, n);
  if (v2.kind != analysis::VerdictKind::Converges)
    throw PreconditionError(
        "rate_experiment: phi2 criterion verdict is " +
        std::string(analysis::to_string(v2.kind)));
  double growth = 0;
  for (double lt : {std::log(1e6), std::log(1e9), std::log(1e12)})
    growth = std::max(growth, phi1.log_at(lt) - phi1.log_at(0.0));
  if (!(growth > std::log(10.0)))
    throw PreconditionError("rate_experiment: phi1 shows no tenfold growth");

  const EigenEnumeration e = EigenEnumeration::build(n, f.cutoff());
  const orfun::OrFunction phi = orfun::OrFunction::product(phi1, phi2);
  const double norm_phi =
      field_norm(f, phi, spectral::NormScheme::Eigen, e);
  const std::size_t N = e.total();

  // theta_k: tail fraction of g_j = phi(nu_j) x_j
  std::vector<double> g2(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double w = std::exp(phi.log_at(std::log(e.nu[j])));
    g2[j] = w * w * std::norm(f.coeffs()[static_cast<std::size_t>(e.flat[j])]);
  }
  std::vector<double> tail(N + 1, 0.0);
  for (std::size_t j = N; j > 0; --j) tail[j - 1] = tail[j] + g2[j - 1];
  const double g_total = tail[0];

  // degree factor sup_{j > k} 1 / phi1(j^(1/n))
  std::vector<double> degree(N + 1, 0.0);
  for (std::size_t j = N; j > 0; --j)
    degree[j - 1] = std::max(
        degree[j],
        std::exp(-phi1.log_at(std::log(static_cast<double>(j)) / n)));
  // degree[k] uses 1-based j = k+1, i.e. index k of this suffix array

  // l1 mass of the C^q tail coefficients: a rigorous upper envelope of the
  // grid error (derivative factor (1+|k|)^q per axis bound)
  std::vector<double> l1(N + 1, 0.0);
  for (std::size_t j = N; j > 0; --j) {
    double fac = 1;
    for (int a = 0; a < n; ++a)
      fac *= std::pow(1.0 + std::abs(e.modes[j - 1][a]), q);
    l1[j - 1] =
        l1[j] + fac * std::abs(f.coeffs()[static_cast<std::size_t>(e.flat[j - 1])]);
  }

  std::vector<std::size_t> sorted_ks(ks);
  std::sort(sorted_ks.begin(), sorted_ks.end());
  for (std::size_t k : sorted_ks)
    if (k > N) throw std::out_of_range("rate_experiment: k exceeds mode total");

  RateResult out;
  out.grid_per_axis = G;
  out.norm_phi = norm_phi;
  SumTracker tracker(f, e, q, G);
  std::size_t covered = 0;
  for (std::size_t k : sorted_ks) {
    while (covered < k) tracker.cover(covered++);
    RateRow row;
    row.k = k;
    row.error = tracker.cq_error();
    row.theta = g_total > 0 ? std::sqrt(tail[k] / g_total) : 0.0;
    row.degree = k < N ? degree[k] : 0.0;
    row.bound = norm_phi * row.degree * row.theta;
    row.ratio = row.bound > 0 ? row.error / row.bound : 0.0;
    row.l1_bound = l1[k];
    out.rows.push_back(row);
    out.c_star = std::max(out.c_star, row.ratio);
  }
  return out;
}

ProbeResult unconditional_probe(const TorusField& f,
                                const orfun::OrFunction& phi, int q,
                                int num_perms, std::uint64_t seed,
                                const std::vector<double>& eps_levels,
                                int grid_per_axis) {
  const int n = f.dim();
  const int G = default_grid(f.cutoff(), grid_per_axis);
  check_grid(f.cutoff(), G);
  ProbeResult out;
  out.seed = seed;
  out.eps_levels = eps_levels;
  out.criterion = analysis::criterion_integral(phi, q, n);
  if (out.criterion.kind != analysis::VerdictKind::Converges)
    throw PreconditionError(
        "unconditional_probe: criterion verdict is " +
        std::string(analysis::to_string(out.criterion.kind)));

  const EigenEnumeration e = EigenEnumeration::build(n, f.cutoff());
  const std::size_t N = e.total();
  std::vector<std::int32_t> order(N);
  for (int p = 0; p <= num_perms; ++p) {
    for (std::size_t i = 0; i < N; ++i) order[i] = static_cast<std::int32_t>(i);
    if (p > 0) {
      lab::Rng rng(seed + static_cast<std::uint64_t>(p));
      rng.shuffle(order);
    }
    SumTracker tracker(f, e, q, G);
    std::vector<std::int64_t> reached(eps_levels.size(), -1);
    double err = tracker.cq_error();
    for (std::size_t i = 0; i < N; ++i) {
      tracker.cover(static_cast<std::size_t>(order[i]));
      err = tracker.cq_error();
      for (std::size_t l = 0; l < eps_levels.size(); ++l)
        if (reached[l] < 0 && err <= eps_levels[l])
          reached[l] = static_cast<std::int64_t>(i + 1);
    }
    out.k_at_level.push_back(std::move(reached));
    out.final_residual.push_back(err);
  }
  return out;
}

AeDiagnostics ae_diagnostics(const TorusField& f,
                             const orfun::OrFunction& phi,
                             int grid_per_axis) {
  const int G = default_grid(f.cutoff(), grid_per_axis);
  check_grid(f.cutoff(), G);
  const EigenEnumeration e = EigenEnumeration::build(f.dim(), f.cutoff());
  GridGeometry gg(f.dim(), G);

  AeDiagnostics out;
  std::vector<Complex> running(gg.points, Complex());
  std::vector<double> best(gg.points, 0.0);
  for (std::size_t j = 0; j < e.total(); ++j) {
    const Complex c = f.coeffs()[static_cast<std::size_t>(e.flat[j])];
    for_each_phase(gg, e.modes[j], [&](std::size_t p, int r) {
      running[p] += c * gg.phase[static_cast<std::size_t>(r)];
      best[p] = std::max(best[p], std::abs(running[p]));
    });
  }
  double s2 = 0;
  for (double b : best) s2 += b * b;
  out.majorant_l2 = std::sqrt(s2 / static_cast<double>(gg.points));

  for (std::size_t j = 0; j < e.total(); ++j) {
    const double aj2 =
        std::norm(f.coeffs()[static_cast<std::size_t>(e.flat[j])]);
    const double jj = static_cast<double>(j + 1);
    const double lg1 = std::log(jj + 1);
    out.mr_sum += lg1 * lg1 * aj2;
    if (j + 1 >= 2) {
      const double lg = std::log(jj);
      const double w = std::exp(2 * phi.log_at(std::log(jj) / f.dim()));
      out.orlicz_weighted += lg * lg * w * aj2;
      if (j + 1 >= 3) out.orlicz_condition += 1.0 / (jj * lg * w);
    }
  }
  out.norm_logstar = field_norm(f, orfun::OrFunction::logstar(),
                                spectral::NormScheme::Index, e);
  out.fitted_c =
      out.norm_logstar > 0 ? out.majorant_l2 / out.norm_logstar : 0.0;
  return out;
}

SeriesGrowth orlicz_condition_series(const orfun::OrFunction& phi, int n,
                                     std::size_t j_max) {
  SeriesGrowth out;
  out.strictly_increasing = true;
  double sum = 0;
  double at_half = 0;
  std::size_t next_checkpoint = 4;
  for (std::size_t j = 3; j <= j_max; ++j) {
    const double jj = static_cast<double>(j);
    const double w = std::exp(2 * phi.log_at(std::log(jj) / n));
    const double term = 1.0 / (jj * std::log(jj) * w);
    if (!(term > 0)) out.strictly_increasing = false;
    sum += term;
    if (j == next_checkpoint || j == j_max) {
      out.checkpoints.emplace_back(j, sum);
      next_checkpoint *= 2;
    }
    if (j == j_max / 2) at_half = sum;
  }
  out.last_doubling_growth = sum > 0 ? (sum - at_half) / sum : 0.0;
  return out;
}

nlohmann::json to_json(const TorusField& f) {
  nlohmann::json j;
  j["n"] = f.dim();
  j["M"] = f.cutoff();
  nlohmann::json modes = nlohmann::json::array();
  const EigenEnumeration e = EigenEnumeration::build(f.dim(), f.cutoff());
  for (std::size_t i = 0; i < e.total(); ++i) {
    const Complex c = f.coeffs()[static_cast<std::size_t>(e.flat[i])];
    if (c == Complex(0, 0)) continue;
    nlohmann::json m;
    std::vector<int> k(e.modes[i].begin(), e.modes[i].begin() + f.dim());
    m["k"] = k;
    m["re"] = c.real();
    m["im"] = c.imag();
    modes.push_back(std::move(m));
  }
  j["modes"] = std::move(modes);
  return j;
}

TorusField torus_field_from_json(const nlohmann::json& j) {
  TorusField f(j.at("n").get<int>(), j.at("M").get<int>());
  for (const auto& m : j.at("modes")) {
    const auto kv = m.at("k").get<std::vector<int>>();
    if (kv.size() != static_cast<std::size_t>(f.dim()))
      throw std::invalid_argument("torus field JSON: bad mode arity");
    Mode k{0, 0, 0};
    std::copy(kv.begin(), kv.end(), k.begin());
    f.set_mode(k, Complex(m.at("re").get<double>(), m.at("im").get<double>()));
  }
  return f;
}

}  // namespace hscale::torus
