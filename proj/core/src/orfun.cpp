#include "hscale/orfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hscale::orfun {

using Kind = OrFunction::Kind;

namespace {

using Node = OrFunction::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Kind k, double a = 0, NodePtr l = nullptr, NodePtr r = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = a;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

double node_log_at(const Node& n, double u);

double psi_log_at(const Node& expr, double log_tau) {
  return node_log_at(expr, std::max(log_tau, 0.0));
}

double tabulated_log_at(const Node& n, double u) {
  const auto& lt = n.log_t;
  const auto& lv = n.log_v;
  const size_t m = lt.size();
  if (u >= lt[m - 1]) {
    // power-law extrapolation fitted to the last two knots
    const double slope = (lv[m - 1] - lv[m - 2]) / (lt[m - 1] - lt[m - 2]);
    return lv[m - 1] + slope * (u - lt[m - 1]);
  }
  const auto it = std::upper_bound(lt.begin(), lt.end(), u);
  const size_t i = static_cast<size_t>(it - lt.begin());
  // lt[0] == 0 and u >= 0, so i >= 1 here
  const double w = (u - lt[i - 1]) / (lt[i] - lt[i - 1]);
  return lv[i - 1] + w * (lv[i] - lv[i - 1]);
}

double node_log_at(const Node& n, double u) {
  switch (n.kind) {
    case Kind::Power:
      return n.a * u;
    case Kind::LogP:
      return n.a * std::log1p(u);
    case Kind::LogLogP:
      return n.a * std::log1p(std::log1p(u));
    case Kind::LogStar:
      return std::log(std::max(1.0, u));
    case Kind::Const:
      return n.a;  // stores log c
    case Kind::Product:
      return node_log_at(*n.lhs, u) + node_log_at(*n.rhs, u);
    case Kind::Quotient:
      return node_log_at(*n.lhs, u) - node_log_at(*n.rhs, u);
    case Kind::Rescale:
      return node_log_at(*n.lhs, n.a * u);
    case Kind::Tabulated:
      return tabulated_log_at(n, u);
    case Kind::Interp: {
      const double l0 = node_log_at(*n.lhs, u);
      const double l1 = node_log_at(*n.rhs, u);
      return l0 + psi_log_at(*n.psi, l1 - l0);
    }
  }
  return 0;  // unreachable
}

bool node_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.a != b.a) return false;
  if (a.log_t != b.log_t || a.log_v != b.log_v) return false;
  auto eq = [](const NodePtr& x, const NodePtr& y) {
    if (!x || !y) return !x && !y;
    return node_equal(*x, *y);
  };
  return eq(a.lhs, b.lhs) && eq(a.rhs, b.rhs) && eq(a.psi, b.psi);
}

std::optional<std::pair<double, double>> node_power_form(const Node& n) {
  using Form = std::pair<double, double>;
  switch (n.kind) {
    case Kind::Power:
      return Form{n.a, 0.0};
    case Kind::Const:
      return Form{0.0, n.a};
    case Kind::LogP:
    case Kind::LogLogP:
      if (n.a == 0) return Form{0.0, 0.0};
      return std::nullopt;
    case Kind::Product: {
      auto l = node_power_form(*n.lhs);
      auto r = node_power_form(*n.rhs);
      if (l && r) return Form{l->first + r->first, l->second + r->second};
      return std::nullopt;
    }
    case Kind::Quotient: {
      auto l = node_power_form(*n.lhs);
      auto r = node_power_form(*n.rhs);
      if (l && r) return Form{l->first - r->first, l->second - r->second};
      return std::nullopt;
    }
    case Kind::Rescale: {
      auto l = node_power_form(*n.lhs);
      if (l) return Form{l->first * n.a, l->second};
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

OrFunction OrFunction::power(double s) {
  if (!std::isfinite(s)) throw std::invalid_argument("power: exponent not finite");
  return OrFunction(make(Kind::Power, s));
}

OrFunction OrFunction::logp(double e) {
  if (!std::isfinite(e)) throw std::invalid_argument("logp: exponent not finite");
  return OrFunction(make(Kind::LogP, e));
}

OrFunction OrFunction::loglogp(double e) {
  if (!std::isfinite(e))
    throw std::invalid_argument("loglogp: exponent not finite");
  return OrFunction(make(Kind::LogLogP, e));
}

OrFunction OrFunction::logstar() { return OrFunction(make(Kind::LogStar)); }

OrFunction OrFunction::constant(double c) {
  if (!(c > 0) || !std::isfinite(c))
    throw std::invalid_argument("constant: requires c > 0");
  return OrFunction(make(Kind::Const, std::log(c)));
}

OrFunction OrFunction::product(OrFunction a, OrFunction b) {
  return OrFunction(make(Kind::Product, 0, a.node_, b.node_));
}

OrFunction OrFunction::quotient(OrFunction a, OrFunction b) {
  return OrFunction(make(Kind::Quotient, 0, a.node_, b.node_));
}

OrFunction OrFunction::rescale(OrFunction f, double p) {
  if (!(p > 0) || !std::isfinite(p))
    throw std::invalid_argument("rescale: requires p > 0");
  return OrFunction(make(Kind::Rescale, p, f.node_));
}

OrFunction OrFunction::tabulated(const std::vector<double>& t,
                                 const std::vector<double>& v) {
  if (t.size() != v.size())
    throw std::invalid_argument("tabulated: size mismatch");
  std::vector<double> lt(t.size()), lv(v.size());
  for (size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] >= 1)) throw std::invalid_argument("tabulated: knots must be >= 1");
    if (!(v[i] > 0)) throw std::invalid_argument("tabulated: values must be > 0");
    lt[i] = std::log(t[i]);
    lv[i] = std::log(v[i]);
  }
  return tabulated_log(std::move(lt), std::move(lv));
}

OrFunction OrFunction::tabulated_log(std::vector<double> log_t,
                                     std::vector<double> log_v) {
  if (log_t.size() != log_v.size())
    throw std::invalid_argument("tabulated: size mismatch");
  if (log_t.size() < 2)
    throw std::invalid_argument("tabulated: needs at least two knots");
  if (log_t.front() != 0)
    throw std::invalid_argument("tabulated: first knot must be t = 1");
  for (size_t i = 0; i + 1 < log_t.size(); ++i)
    if (!(log_t[i] < log_t[i + 1]))
      throw std::invalid_argument("tabulated: knots must be strictly increasing");
  for (double lv : log_v)
    if (!std::isfinite(lv))
      throw std::invalid_argument("tabulated: values must be positive finite");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Tabulated;
  n->log_t = std::move(log_t);
  n->log_v = std::move(log_v);
  return OrFunction(std::move(n));
}

double OrFunction::log_at(double log_t) const {
  return node_log_at(*node_, log_t);
}

double OrFunction::operator()(double t) const {
  if (!(t >= 1.0))
    throw std::domain_error("OrFunction: argument must satisfy t >= 1");
  const double value = std::exp(node_log_at(*node_, std::log(t)));
  if (!(value > 0))
    throw std::overflow_error("OrFunction: non-positive or overflowed value");
  return value;
}

std::optional<std::pair<double, double>> OrFunction::power_form() const {
  return node_power_form(*node_);
}

std::optional<double> OrFunction::as_power() const {
  auto f = node_power_form(*node_);
  if (f && f->second == 0.0) return f->first;
  return std::nullopt;
}

bool OrFunction::operator==(const OrFunction& other) const {
  return node_equal(*node_, *other.node_);
}

double PsiParameter::operator()(double tau) const {
  if (!(tau > 0)) throw std::domain_error("PsiParameter: requires tau > 0");
  return std::exp(log_at(std::log(tau)));
}

double PsiParameter::log_at(double log_tau) const {
  return expr_.log_at(std::max(log_tau, 0.0));
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0) || !(hi > lo) || count < 2)
    throw std::invalid_argument("log_grid: bad range");
  std::vector<double> g(static_cast<size_t>(count));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    g[static_cast<size_t>(i)] =
        std::exp(llo + (lhi - llo) * i / (count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

double verify_or_membership(const OrFunction& f, double a,
                            const RatioGrid& grid) {
  if (!(a > 1)) throw std::invalid_argument("verify_or_membership: a > 1 required");
  double c = 1.0;
  const double la_max = std::log(a);
  for (int i = 0; i < grid.t_count; ++i) {
    const double u = std::log(grid.t_max) * i / (grid.t_count - 1);
    const double base = f.log_at(u);
    for (int j = 1; j < grid.lambda_count; ++j) {
      const double ll = la_max * j / (grid.lambda_count - 1);
      const double d = f.log_at(u + ll) - base;
      if (!std::isfinite(d))
        throw std::overflow_error("verify_or_membership: ratio overflow");
      c = std::max(c, std::exp(std::abs(d)));
    }
  }
  return c;
}

namespace {

// Least-squares slope of (log lambda, log f(lambda t) - log f(t)) at a fixed
// anchor u = log t, over lambda in [10, lambda_max].
double ratio_slope(const OrFunction& f, double u, const IndexGridSpec& spec) {
  const double base = f.log_at(u);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  const double lmax = std::log(spec.lambda_max);
  for (int j = 0; j < spec.lambda_count; ++j) {
    const double ll = lmax * (j + 1) / spec.lambda_count;
    if (ll < std::log(10.0)) continue;
    const double d = f.log_at(u + ll) - base;
    sx += ll;
    sy += d;
    sxx += ll * ll;
    sxy += ll * d;
    ++m;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

struct LevelEstimate {
  double sigma0, sigma1;
};

// Slopes at `anchors` points spread over two decades below t_top, Richardson
// extrapolated in k = 1 + log t between scales k and k/2 (kills the 1/k
// contribution of slowly varying factors).
LevelEstimate index_level(const OrFunction& f, double k_top,
                          const IndexGridSpec& spec) {
  LevelEstimate e{std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
  const double spread = std::log(100.0);
  for (int i = 0; i < spec.anchor_count; ++i) {
    const double off =
        spec.anchor_count > 1 ? spread * i / (spec.anchor_count - 1) : 0.0;
    const double k2 = k_top - off;
    const double k1 = k2 / 2;
    const double s2 = ratio_slope(f, k2 - 1, spec);
    const double s1 = ratio_slope(f, k1 - 1, spec);
    const double extrap = 2 * s2 - s1;
    e.sigma0 = std::min(e.sigma0, extrap);
    e.sigma1 = std::max(e.sigma1, extrap);
  }
  return e;
}

}  // namespace

IndexEstimate matuszewska_indices(const OrFunction& f,
                                  const IndexGridSpec& spec) {
  IndexEstimate out;
  out.grid = spec;
  const double k_top = 1 + std::log(spec.t_top);
  const LevelEstimate fine = index_level(f, k_top, spec);
  const LevelEstimate coarse = index_level(f, k_top / 2, spec);
  out.sigma0 = fine.sigma0;
  out.sigma1 = fine.sigma1;
  out.drift = std::max(std::abs(fine.sigma0 - coarse.sigma0),
                       std::abs(fine.sigma1 - coarse.sigma1)) /
              std::max(1.0, std::max(std::abs(fine.sigma0),
                                     std::abs(fine.sigma1)));
  out.inconclusive = out.drift > 0.02;

  // Re-check the fitted exponents as a two-sided power bound on the standard
  // grid: fit the constants there, then measure the worst violation on the
  // lambda-extended grid. Zero for pure power laws; positive residual flags
  // a bound whose constants are not attained uniformly.
  const int tn = 128, ln = 64;
  double log_c1 = -std::numeric_limits<double>::infinity();
  double log_c0 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < tn; ++i) {
    const double u = std::log(1e6) * i / (tn - 1);
    const double base = f.log_at(u);
    for (int j = 1; j < ln; ++j) {
      const double ll = std::log(1e3) * j / (ln - 1);
      const double d = f.log_at(u + ll) - base;
      log_c1 = std::max(log_c1, d - out.sigma1 * ll);
      log_c0 = std::min(log_c0, d - out.sigma0 * ll);
    }
  }
  double viol = 0;
  for (int i = 0; i < tn; ++i) {
    const double u = std::log(1e6) * i / (tn - 1);
    const double base = f.log_at(u);
    for (int j = 1; j < ln; ++j) {
      const double ll = std::log(1e6) * j / (ln - 1);
      const double d = f.log_at(u + ll) - base;
      viol = std::max(viol, (d - out.sigma1 * ll) - log_c1);
      viol = std::max(viol, log_c0 - (d - out.sigma0 * ll));
    }
  }
  out.residual = viol;
  return out;
}

MembershipResult interpolation_membership(const OrFunction& f, double s0,
                                          double s1, double margin) {
  if (!(s0 < s1))
    throw std::invalid_argument("interpolation_membership: requires s0 < s1");
  MembershipResult r;
  r.indices = matuszewska_indices(f);

  // Fitted constants for three lambda ranges; membership requires the last
  // extension step to leave them (log-)stable.
  const int tn = 128, ln = 96;
  auto fit = [&](double lambda_hi) {
    std::pair<double, double> c{std::numeric_limits<double>::infinity(),
                                -std::numeric_limits<double>::infinity()};
    for (int i = 0; i < tn; ++i) {
      const double u = std::log(1e6) * i / (tn - 1);
      const double base = f.log_at(u);
      for (int j = 0; j < ln; ++j) {  // j = 0 keeps lambda = 1 in the fit
        const double ll = std::log(lambda_hi) * j / (ln - 1);
        const double d = f.log_at(u + ll) - base;
        c.first = std::min(c.first, d - s0 * ll);    // log c0
        c.second = std::max(c.second, d - s1 * ll);  // log c1
      }
    }
    return c;
  };
  const auto mid = fit(1e6);
  const auto wide = fit(1e12);
  const double drift =
      std::max(std::abs(wide.first - mid.first), std::abs(wide.second - mid.second));
  r.member = drift <= 0.05;
  r.c0 = std::exp(wide.first);
  r.c1 = std::exp(wide.second);
  r.boundary = std::abs(s0 - r.indices.sigma0) <= margin ||
               std::abs(s1 - r.indices.sigma1) <= margin;
  return r;
}

PsiParameter make_interpolation_parameter(const OrFunction& f, double s0,
                                          double s1) {
  if (!(s0 < s1))
    throw std::invalid_argument("make_interpolation_parameter: s0 < s1 required");
  if (!interpolation_membership(f, s0, s1).member)
    throw PreconditionError(
        "make_interpolation_parameter: (s0, s1) not certified for this function");
  const double d = s1 - s0;
  return PsiParameter(OrFunction::product(OrFunction::power(-s0 / d),
                                          OrFunction::rescale(f, 1 / d)));
}

OrFunction compose_parameterized(const OrFunction& f0, const OrFunction& f1,
                                 const PsiParameter& psi, double ratio_bound) {
  const int tn = 256;
  for (int i = 0; i < tn; ++i) {
    const double u = std::log(1e6) * i / (tn - 1);
    if (f0.log_at(u) - f1.log_at(u) > std::log(ratio_bound))
      throw PreconditionError(
          "compose_parameterized: f0/f1 exceeds the boundedness threshold");
  }
  auto n = std::make_shared<OrFunction::Node>();
  n->kind = Kind::Interp;
  n->lhs = f0.node();
  n->rhs = f1.node();
  n->psi = psi.upper().node();
  return OrFunction(std::move(n));
}

double pseudoconcavity_constant(const PsiParameter& psi,
                                const std::vector<double>& grid) {
  std::vector<double> v(grid);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (v.size() < 2)
    throw std::invalid_argument("pseudoconcavity_constant: grid too small");
  const size_t n = v.size();
  std::vector<double> lp(n), lv(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(v[i] > 0))
      throw std::invalid_argument("pseudoconcavity_constant: grid must be > 0");
    lv[i] = std::log(v[i]);
    lp[i] = psi.log_at(lv[i]);
  }
  // pairs t <= tau: max of lp(t) - lp(tau); pairs t > tau: max of
  // (lp(t) - lv(t)) + (lv(tau) - lp(tau)). Prefix scans give both in O(n).
  double best = 0;
  double pref_lp = -std::numeric_limits<double>::infinity();
  double pref_q = -std::numeric_limits<double>::infinity();  // lv - lp
  for (size_t i = 0; i < n; ++i) {
    pref_lp = std::max(pref_lp, lp[i]);
    best = std::max(best, pref_lp - lp[i]);
    if (i > 0) best = std::max(best, (lp[i] - lv[i]) + pref_q);
    pref_q = std::max(pref_q, lv[i] - lp[i]);
  }
  return std::exp(best);
}

double pseudoconcavity_constant(const PsiParameter& psi, double domain_lo,
                                double t_max, int count) {
  return pseudoconcavity_constant(psi, log_grid(domain_lo, t_max, count));
}

double PiecewiseLinear::operator()(double t) const {
  const size_t n = x.size();
  if (t <= x.front()) {
    const double s = (y[1] - y[0]) / (x[1] - x[0]);
    return y[0] + s * (t - x[0]);
  }
  if (t >= x.back()) {
    const double s = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
    return y[n - 1] + s * (t - x[n - 1]);
  }
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const size_t i = static_cast<size_t>(it - x.begin());
  const double w = (t - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + w * (y[i] - y[i - 1]);
}

PiecewiseLinear least_concave_majorant(
    const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("least_concave_majorant: need >= 2 samples");
  for (size_t i = 0; i + 1 < samples.size(); ++i)
    if (!(samples[i].first < samples[i + 1].first))
      throw std::invalid_argument(
          "least_concave_majorant: abscissae must be strictly increasing");
  // Monotone-chain upper hull. cross <= 0 keeps the chain concave.
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : samples) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      const double cross = (b.first - a.first) * (p.second - a.second) -
                           (b.second - a.second) * (p.first - a.first);
      if (cross >= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  PiecewiseLinear out;
  out.x.reserve(hull.size());
  out.y.reserve(hull.size());
  for (const auto& p : hull) {
    out.x.push_back(p.first);
    out.y.push_back(p.second);
  }
  if (out.x.size() == 1) {  // degenerate: all samples collinear upward
    out.x.push_back(samples.back().first);
    out.y.push_back(samples.back().second);
  }
  return out;
}

double dilation_function(const PsiParameter& psi, double lambda,
                         const std::vector<double>& grid) {
  if (!(lambda > 0))
    throw std::invalid_argument("dilation_function: lambda > 0 required");
  const double ll = std::log(lambda);
  double best = -std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const double lt = std::log(t);
    best = std::max(best, psi.log_at(lt + ll) - psi.log_at(lt));
  }
  return std::exp(best);
}

double dilation_function(const PsiParameter& psi, double lambda) {
  return dilation_function(psi, lambda, log_grid(1e-6, 1e6, 513));
}

}  // namespace hscale::orfun
