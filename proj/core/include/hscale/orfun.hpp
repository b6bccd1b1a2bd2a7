#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hscale {

/// Thrown when a documented precondition certificate fails (the caller asked
/// for something the numerical evidence does not support). The CLI maps this
/// to exit code 3.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace orfun {

/// Positive combinator-built function on [1, inf), the admissible
/// "regularity order" class. Immutable value type; cheap to copy (shared
/// expression tree). All evaluation goes through log space so that argument
/// scales far beyond double range (t up to e^~1e5) stay representable.
class OrFunction {
 public:
  enum class Kind {
    Power,
    LogP,
    LogLogP,
    LogStar,
    Const,
    Product,
    Quotient,
    Rescale,
    Tabulated,
    Interp
  };
  struct Node {
    Kind kind;
    double a = 0;  // exponent, constant (stored as log c), or rescale power
    std::shared_ptr<const Node> lhs, rhs;
    std::shared_ptr<const Node> psi;   // Interp only (clamped at tau = 1)
    std::vector<double> log_t, log_v;  // Tabulated only
  };

  // combinators
  static OrFunction power(double s);              // t^s
  static OrFunction logp(double e);               // (1 + log t)^e
  static OrFunction loglogp(double e);            // (1 + log(1 + log t))^e
  static OrFunction logstar();                    // max{1, log t}
  static OrFunction constant(double c);           // c > 0
  static OrFunction product(OrFunction a, OrFunction b);
  static OrFunction quotient(OrFunction a, OrFunction b);
  static OrFunction rescale(OrFunction f, double p);  // f(t^p), p > 0

  /// Knots given as plain t-values (first knot must be t = 1, strictly
  /// increasing, values > 0). Log-linear interpolation between knots,
  /// power-law extrapolation beyond the last knot fitted to the last two.
  static OrFunction tabulated(const std::vector<double>& t,
                              const std::vector<double>& v);
  /// Same, with knots already in (log t, log value) form. This is the native
  /// representation; it admits knots at t far beyond double range.
  static OrFunction tabulated_log(std::vector<double> log_t,
                                  std::vector<double> log_v);

  double operator()(double t) const;  // requires t >= 1
  /// log f(e^u) for u = log t >= 0. Never overflows for combinator trees.
  double log_at(double log_t) const;

  /// (s, log c) when the tree is exactly c * t^s; nullopt otherwise.
  std::optional<std::pair<double, double>> power_form() const;
  /// s when the tree is exactly t^s (unit coefficient).
  std::optional<double> as_power() const;

  bool operator==(const OrFunction& other) const;

  const std::shared_ptr<const Node>& node() const { return node_; }
  explicit OrFunction(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<const Node> node_;
};

/// Interpolation parameter: an OrFunction extended to (0, inf) with the
/// constant left branch psi(tau) = expr(1) for 0 < tau < 1.
class PsiParameter {
 public:
  explicit PsiParameter(OrFunction expr) : expr_(std::move(expr)) {}

  double operator()(double tau) const;       // requires tau > 0
  double log_at(double log_tau) const;       // clamps log_tau to >= 0

  const OrFunction& upper() const { return expr_; }
  /// theta when psi(tau) = tau^theta exactly on [1, inf).
  std::optional<double> power_exponent() const { return expr_.as_power(); }

  bool operator==(const PsiParameter& o) const { return expr_ == o.expr_; }

 private:
  OrFunction expr_;
};

/// Log-spaced grid, endpoints included.
std::vector<double> log_grid(double lo, double hi, int count);

/// Grid on which ratio bounds are certified. Defaults are the standard
/// verification grid: 256 log-spaced t in [1, 1e6] x 64 log-spaced lambda.
struct RatioGrid {
  double t_max = 1e6;
  int t_count = 256;
  int lambda_count = 64;
};

/// Smallest grid constant c >= 1 with 1/c <= f(lambda t)/f(t) <= c for all
/// grid t and lambda in [1, a]. A certificate over the grid, not a proof.
double verify_or_membership(const OrFunction& f, double a,
                            const RatioGrid& grid = {});

struct IndexGridSpec {
  double t_top = 1e26;     // largest anchor scale
  double lambda_max = 1e3;
  int lambda_count = 64;
  int anchor_count = 8;    // t anchors per scale, spread over two decades
};

struct IndexEstimate {
  double sigma0 = 0;
  double sigma1 = 0;
  double residual = 0;   // worst violation of the re-checked bound, >= 0
  double drift = 0;      // relative movement between the two finest levels
  bool inconclusive = false;  // drift > 0.02
  IndexGridSpec grid;
};

/// Estimates the lower/upper Matuszewska indices from the log-lambda slope
/// of f(lambda t)/f(t) at large anchors t, Richardson-extrapolated in
/// 1/(1 + log t) to remove the slowly varying contribution.
IndexEstimate matuszewska_indices(const OrFunction& f,
                                  const IndexGridSpec& spec = {});

struct MembershipResult {
  bool member = false;
  bool boundary = false;  // |s - sigma| within margin: attainment unknown
  double c0 = 0;          // fitted lower constant on the extended grid
  double c1 = 0;          // fitted upper constant on the extended grid
  IndexEstimate indices;
};

/// Grid certificate that c0 * lambda^s0 <= f(lambda t)/f(t) <= c1 * lambda^s1
/// admits finite constants: the fitted c0, c1 must be stable when the lambda
/// range is extended from 1e6 to 1e12. Boundary cases (|s - sigma| <= margin)
/// are flagged, never resolved.
MembershipResult interpolation_membership(const OrFunction& f, double s0,
                                          double s1, double margin = 1e-3);

/// psi(tau) = tau^(-s0/(s1-s0)) * f(tau^(1/(s1-s0))) for tau >= 1, constant
/// f(1) on (0, 1). Requires interpolation_membership(f, s0, s1).
PsiParameter make_interpolation_parameter(const OrFunction& f, double s0,
                                          double s1);

/// phi(t) = f0(t) * psi(f1(t)/f0(t)). Rejects when sup f0/f1 on the standard
/// grid exceeds ratio_bound (the boundedness hypothesis).
OrFunction compose_parameterized(const OrFunction& f0, const OrFunction& f1,
                                 const PsiParameter& psi,
                                 double ratio_bound = 1e6);

/// c = sup over grid pairs (t, tau) of psi(t) / (psi(tau) * max{1, t/tau}).
/// O(N log N) in the number of grid points.
double pseudoconcavity_constant(const PsiParameter& psi,
                                const std::vector<double>& grid);
/// Convenience overload: log-spaced grid [domain_lo, t_max].
double pseudoconcavity_constant(const PsiParameter& psi, double domain_lo,
                                double t_max = 1e6, int count = 513);

/// Piecewise-linear function with linear extension beyond the sample hull.
struct PiecewiseLinear {
  std::vector<double> x;
  std::vector<double> y;
  double operator()(double t) const;
};

/// Upper concave envelope of the samples (x strictly increasing, y > 0).
PiecewiseLinear least_concave_majorant(
    const std::vector<std::pair<double, double>>& samples);

/// Dilation estimate: sup over grid t of psi(lambda t)/psi(t).
double dilation_function(const PsiParameter& psi, double lambda,
                         const std::vector<double>& grid);
double dilation_function(const PsiParameter& psi, double lambda);

}  // namespace orfun
}  // namespace hscale
