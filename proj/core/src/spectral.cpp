#include "hscale/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hscale::spectral {

namespace {

double norm_from_log_weights(const std::vector<double>& lw,
                             const std::vector<Complex>& c) {
  // Kahan summation; deterministic order
  double sum = 0, comp = 0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double w = std::exp(lw[j]);
    const double term = w * w * std::norm(c[j]);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return std::sqrt(sum);
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw std::invalid_argument(std::string(what) + ": length mismatch");
}

}  // namespace

SpectralOperator::SpectralOperator(std::vector<double> eigenvalues)
    : lambda(std::move(eigenvalues)) {
  if (lambda.empty())
    throw std::invalid_argument("SpectralOperator: empty eigenvalue list");
  if (!(lambda.front() >= 1))
    throw std::invalid_argument("SpectralOperator: eigenvalues must be >= 1");
  for (std::size_t j = 0; j + 1 < lambda.size(); ++j)
    if (!(lambda[j] <= lambda[j + 1]))
      throw std::invalid_argument("SpectralOperator: eigenvalues must be nondecreasing");
}

CoeffVector CoeffVector::basis(std::size_t n, std::size_t j) {
  CoeffVector u;
  u.c.assign(n, Complex(0, 0));
  u.c.at(j) = Complex(1, 0);
  return u;
}

CoeffVector apply_spectral_function(const SpectralOperator& A,
                                    const orfun::OrFunction& f,
                                    const CoeffVector& u) {
  require_same_size(A.size(), u.size(), "apply_spectral_function");
  CoeffVector v;
  v.c.resize(u.size());
  for (std::size_t j = 0; j < u.size(); ++j)
    v.c[j] = std::exp(f.log_at(std::log(A.lambda[j]))) * u.c[j];
  return v;
}

double graded_norm(const SpectralOperator& A, const orfun::OrFunction& phi,
                   const CoeffVector& u, NormScheme scheme, int dim) {
  require_same_size(A.size(), u.size(), "graded_norm");
  std::vector<double> lw(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double arg = scheme == NormScheme::Eigen
                           ? std::log(A.lambda[j])
                           : std::log(static_cast<double>(j + 1)) / dim;
    lw[j] = phi.log_at(arg);
  }
  return norm_from_log_weights(lw, u.c);
}

DiagonalMap generating_multiplier(const orfun::OrFunction& phi0,
                                  const orfun::OrFunction& phi1,
                                  const SpectralOperator& A,
                                  double ratio_bound) {
  DiagonalMap T;
  T.m.resize(A.size());
  for (std::size_t j = 0; j < A.size(); ++j) {
    const double lj = std::log(A.lambda[j]);
    const double d = phi1.log_at(lj) - phi0.log_at(lj);
    if (-d > std::log(ratio_bound))
      throw PreconditionError(
          "generating_multiplier: phi0/phi1 exceeds the boundedness threshold "
          "on the spectrum");
    T.m[j] = std::exp(d);
  }
  return T;
}

InterpolationFrame::InterpolationFrame(const SpectralOperator& A,
                                       orfun::OrFunction phi0,
                                       orfun::OrFunction phi1,
                                       orfun::PsiParameter psi)
    : psi_(std::move(psi)) {
  const std::size_t n = A.size();
  lphi0_.resize(n);
  lphi1_.resize(n);
  lx_.resize(n);
  lpsix_.resize(n);
  double lx_min = std::numeric_limits<double>::infinity();
  double lx_max = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const double lj = std::log(A.lambda[j]);
    lphi0_[j] = phi0.log_at(lj);
    lphi1_[j] = phi1.log_at(lj);
    lx_[j] = lphi1_[j] - lphi0_[j];
    lpsix_[j] = psi_.log_at(lx_[j]);
    lx_min = std::min(lx_min, lx_[j]);
    lx_max = std::max(lx_max, lx_[j]);
  }
  kappa_ = std::exp(lx_min);

  // certificate grid: spectrum ratios plus a log grid spanning them
  std::vector<double> grid;
  grid.reserve(n + 513);
  for (double l : lx_) grid.push_back(std::exp(l));
  const double lo = kappa_;
  const double hi = std::max({std::exp(lx_max), kappa_ * 10, 10.0}) * 10;
  for (double t : orfun::log_grid(lo, hi, 513)) grid.push_back(t);
  c_base_ = orfun::pseudoconcavity_constant(psi_, grid);

  // concavity certificate for chi(v) = psi(sqrt v)^2 on [kappa^2, ...]
  chi_concave_ = true;
  if (lx_max - lx_min > 1e-12) {
    const int m = 128;
    std::vector<double> lv(m), chi(m);
    for (int i = 0; i < m; ++i) {
      lv[i] = 2 * (lx_min + (lx_max - lx_min) * i / (m - 1));
      chi[i] = 2 * psi_.log_at(lv[i] / 2);  // log chi
    }
    double prev_slope = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < m; ++i) {
      const double v0 = std::exp(lv[i]), v1 = std::exp(lv[i + 1]);
      const double slope = (std::exp(chi[i + 1]) - std::exp(chi[i])) / (v1 - v0);
      const double scale = std::max({1.0, std::abs(slope), std::abs(prev_slope)});
      if (slope > prev_slope + 1e-9 * scale) {
        chi_concave_ = false;
        break;
      }
      prev_slope = slope;
    }
  }
}

void InterpolationFrame::check(const CoeffVector& u) const {
  require_same_size(size(), u.size(), "InterpolationFrame");
}

double InterpolationFrame::norm_phi0(const CoeffVector& u) const {
  check(u);
  return norm_from_log_weights(lphi0_, u.c);
}

double InterpolationFrame::norm_phi1(const CoeffVector& u) const {
  check(u);
  return norm_from_log_weights(lphi1_, u.c);
}

double InterpolationFrame::interpolation_norm(const CoeffVector& u) const {
  check(u);
  std::vector<double> lw(size());
  for (std::size_t j = 0; j < size(); ++j) lw[j] = lpsix_[j] + lphi0_[j];
  return norm_from_log_weights(lw, u.c);
}

double InterpolationFrame::norm_phi(const CoeffVector& u) const {
  return interpolation_norm(u);
}

double InterpolationFrame::c_for_tau(double log_tau) const {
  // exact pairs (x_j, tau): psi(x_j) <= c psi(tau) max{1, x_j/tau}
  const double lpt = psi_.log_at(log_tau);
  double c = c_base_;
  for (std::size_t j = 0; j < size(); ++j) {
    const double need = lpsix_[j] - lpt - std::max(0.0, lx_[j] - log_tau);
    c = std::max(c, std::exp(need));
  }
  return c;
}

double InterpolationFrame::tau_slack(const CoeffVector& u, double tau) const {
  check(u);
  if (!(tau >= kappa_ * (1 - 1e-12)))
    throw std::domain_error("tau_slack: tau must be >= kappa");
  const double n0 = norm_phi0(u), n1 = norm_phi1(u), nphi = norm_phi(u);
  const double c = c_for_tau(std::log(tau));
  const double rhs =
      c * psi_(tau) * std::sqrt(n0 * n0 + (n1 / tau) * (n1 / tau));
  return rhs - nphi;
}

SelfTunedSlacks InterpolationFrame::self_tuned(const CoeffVector& u) const {
  check(u);
  const double n0 = norm_phi0(u), n1 = norm_phi1(u), nphi = norm_phi(u);
  if (n0 == 0 || n1 == 0)
    throw std::invalid_argument("self_tuned: zero vector");
  SelfTunedSlacks out;
  out.tau_star = n1 / n0;
  const double ltau = std::log(n1) - std::log(n0);
  out.c_used = c_for_tau(ltau);
  out.slack_a =
      out.c_used * std::sqrt(2.0) * n0 * std::exp(psi_.log_at(ltau)) - nphi;
  if (chi_concave_)
    out.slack_b = n0 * std::exp(psi_.log_at(ltau)) - nphi;
  if (auto theta = psi_.power_exponent(); theta && *theta >= 0 && *theta <= 1)
    out.slack_c = std::pow(n0, 1 - *theta) * std::pow(n1, *theta) - nphi;
  return out;
}

std::pair<double, double> interpolation_norm_identity(
    const orfun::OrFunction& phi0, const orfun::OrFunction& phi1,
    const orfun::PsiParameter& psi, const SpectralOperator& A,
    const CoeffVector& u) {
  InterpolationFrame frame(A, phi0, phi1, psi);
  const double lhs = frame.interpolation_norm(u);
  const double rhs =
      graded_norm(A, orfun::compose_parameterized(phi0, phi1, psi), u);
  return {lhs, rhs};
}

double tau_inequality_check(const orfun::OrFunction& phi0,
                            const orfun::OrFunction& phi1,
                            const orfun::PsiParameter& psi,
                            const SpectralOperator& A, const CoeffVector& u,
                            double tau) {
  return InterpolationFrame(A, phi0, phi1, psi).tau_slack(u, tau);
}

SelfTunedSlacks self_tuned_inequalities(const orfun::OrFunction& phi0,
                                        const orfun::OrFunction& phi1,
                                        const orfun::PsiParameter& psi,
                                        const SpectralOperator& A,
                                        const CoeffVector& u) {
  return InterpolationFrame(A, phi0, phi1, psi).self_tuned(u);
}

OperatorNormRecord operator_norm_interpolation(
    const DiagonalMap& T, const orfun::OrFunction& phi0,
    const orfun::OrFunction& phi1, const orfun::OrFunction& eta0,
    const orfun::OrFunction& eta1, const orfun::PsiParameter& psi,
    const SpectralOperator& A) {
  const std::size_t n = A.size();
  require_same_size(T.m.size(), n, "operator_norm_interpolation");

  std::vector<double> lx(n), ly(n), l0(n), l1(n), li(n);
  double lx_min = std::numeric_limits<double>::infinity();
  double ly_min = lx_min;
  double hi = 10;
  for (std::size_t j = 0; j < n; ++j) {
    const double lj = std::log(A.lambda[j]);
    const double lp0 = phi0.log_at(lj), lp1 = phi1.log_at(lj);
    const double le0 = eta0.log_at(lj), le1 = eta1.log_at(lj);
    lx[j] = lp1 - lp0;
    ly[j] = le1 - le0;
    const double lm =
        T.m[j] == Complex(0, 0) ? -std::numeric_limits<double>::infinity()
                                : std::log(std::abs(T.m[j]));
    l0[j] = lm + le0 - lp0;
    l1[j] = lm + le1 - lp1;
    li[j] = lm + le0 + psi.log_at(ly[j]) - lp0 - psi.log_at(lx[j]);
    lx_min = std::min(lx_min, lx[j]);
    ly_min = std::min(ly_min, ly[j]);
    hi = std::max({hi, std::exp(lx[j]), std::exp(ly[j])});
  }

  OperatorNormRecord r;
  r.nu = std::exp(std::min(lx_min, ly_min));
  const auto imax = [](const std::vector<double>& v) {
    return static_cast<std::size_t>(
        std::max_element(v.begin(), v.end()) - v.begin());
  };
  r.argmax0 = imax(l0);
  r.argmax1 = imax(l1);
  r.argmax = imax(li);
  r.norm0 = std::exp(l0[r.argmax0]);
  r.norm1 = std::exp(l1[r.argmax1]);
  r.norm_interp = std::exp(li[r.argmax]);
  if (r.norm0 == 0)
    throw std::invalid_argument("operator_norm_interpolation: ||T||_0 = 0");
  r.ratio = r.norm1 / r.norm0;
  const double lr = std::log(r.ratio);

  // certificate over both ratio sets, a surrounding grid, and the exact
  // pairs (y_j, ratio * x_j) the bound consumes
  std::vector<double> grid;
  grid.reserve(2 * n + 513);
  for (double l : lx) grid.push_back(std::exp(l));
  for (double l : ly) grid.push_back(std::exp(l));
  for (double t : orfun::log_grid(std::min(r.nu, 0.1), hi * 10, 513))
    grid.push_back(t);
  double c = orfun::pseudoconcavity_constant(psi, grid);
  for (std::size_t j = 0; j < n; ++j) {
    const double need = psi.log_at(ly[j]) - psi.log_at(lr + lx[j]) -
                        std::max(0.0, ly[j] - lr - lx[j]);
    c = std::max(c, std::exp(need));
  }
  r.c_psi_nu = c;

  // dilation over the x-ratio set plus the default grid
  double dil = -std::numeric_limits<double>::infinity();
  for (double l : lx) dil = std::max(dil, psi.log_at(lr + l) - psi.log_at(l));
  for (double t : orfun::log_grid(1e-6, 1e6, 513)) {
    const double lt = std::log(t);
    dil = std::max(dil, psi.log_at(lr + lt) - psi.log_at(lt));
  }
  r.dilation = std::exp(dil);
  r.slack = c * c * std::sqrt(8.0) * r.norm0 * r.dilation - r.norm_interp;
  return r;
}

nlohmann::json to_json(const SpectralOperator& A) {
  return nlohmann::json{{"lambda", A.lambda}};
}

nlohmann::json to_json(const CoeffVector& u) {
  std::vector<double> re(u.size()), im(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    re[j] = u.c[j].real();
    im[j] = u.c[j].imag();
  }
  return nlohmann::json{{"coeff_re", re}, {"coeff_im", im}};
}

SpectralOperator spectral_operator_from_json(const nlohmann::json& j) {
  return SpectralOperator(j.at("lambda").get<std::vector<double>>());
}

CoeffVector coeff_vector_from_json(const nlohmann::json& j) {
  const auto re = j.at("coeff_re").get<std::vector<double>>();
  const auto im = j.at("coeff_im").get<std::vector<double>>();
  if (re.size() != im.size())
    throw std::invalid_argument("coeff vector: re/im length mismatch");
  CoeffVector u;
  u.c.resize(re.size());
  for (std::size_t k = 0; k < re.size(); ++k) u.c[k] = Complex(re[k], im[k]);
  return u;
}

}  // namespace hscale::spectral
