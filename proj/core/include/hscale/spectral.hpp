#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "hscale/orfun.hpp"

namespace hscale::spectral {

using Complex = std::complex<double>;

/// Truncated diagonal model of a positive definite self-adjoint operator:
/// a finite nondecreasing eigenvalue sequence with lambda_1 >= 1.
struct SpectralOperator {
  std::vector<double> lambda;

  explicit SpectralOperator(std::vector<double> eigenvalues);
  std::size_t size() const { return lambda.size(); }
};

/// Complex coefficient sequence in the eigenbasis of a SpectralOperator.
struct CoeffVector {
  std::vector<Complex> c;

  std::size_t size() const { return c.size(); }
  static CoeffVector basis(std::size_t n, std::size_t j);  // e_{j+1}
};

/// Diagonal multiplier sequence (a bounded operator on the model).
struct DiagonalMap {
  std::vector<Complex> m;
};

enum class NormScheme { Eigen, Index };

/// v_j = f(lambda_j) u_j.
CoeffVector apply_spectral_function(const SpectralOperator& A,
                                    const orfun::OrFunction& f,
                                    const CoeffVector& u);

/// sqrt(sum phi^2(w_j) |u_j|^2) with w_j = lambda_j (Eigen scheme) or
/// w_j = j^(1/dim) (Index scheme, 1-based j).
double graded_norm(const SpectralOperator& A, const orfun::OrFunction& phi,
                   const CoeffVector& u, NormScheme scheme = NormScheme::Eigen,
                   int dim = 1);

/// m_j = phi1(lambda_j)/phi0(lambda_j); rejects when sup phi0/phi1 on the
/// spectrum exceeds ratio_bound.
DiagonalMap generating_multiplier(const orfun::OrFunction& phi0,
                                  const orfun::OrFunction& phi1,
                                  const SpectralOperator& A,
                                  double ratio_bound = 1e6);

struct SelfTunedSlacks {
  double slack_a = 0;                // (3b.9new), factor c*sqrt(2)
  std::optional<double> slack_b;     // (3b.11), present iff chi concave
  std::optional<double> slack_c;     // (3b.12), present iff psi is a power
  double tau_star = 0;               // self-tuned ratio ||u||_1 / ||u||_0
  double c_used = 1;
};

/// Caches the spectrum weights of a (phi0, phi1, psi) triple so sweeps pay
/// O(N) per sample. The pseudoconcavity constant is certified over a log
/// grid joined with the spectrum ratios plus, per call, the exact pairs the
/// inequality consumes.
class InterpolationFrame {
 public:
  InterpolationFrame(const SpectralOperator& A, orfun::OrFunction phi0,
                     orfun::OrFunction phi1, orfun::PsiParameter psi);

  double kappa() const { return kappa_; }
  double c_psi_kappa() const { return c_base_; }
  bool chi_concave() const { return chi_concave_; }

  double norm_phi0(const CoeffVector& u) const;
  double norm_phi1(const CoeffVector& u) const;
  double norm_phi(const CoeffVector& u) const;

  /// interpolation-space norm on the diagonal model: weights
  /// psi(x_j) phi0(lambda_j).
  double interpolation_norm(const CoeffVector& u) const;

  double tau_slack(const CoeffVector& u, double tau) const;  // (3b.3)
  SelfTunedSlacks self_tuned(const CoeffVector& u) const;

  const orfun::PsiParameter& psi() const { return psi_; }
  std::size_t size() const { return lx_.size(); }

 private:
  double c_for_tau(double log_tau) const;
  void check(const CoeffVector& u) const;

  orfun::PsiParameter psi_;
  std::vector<double> lphi0_, lphi1_, lx_, lpsix_;
  double kappa_ = 1, c_base_ = 1;
  bool chi_concave_ = false;
};

/// (lhs, rhs) of the interpolation norm identity: lhs from the frame
/// weights, rhs through compose_parameterized and graded_norm. Equal up to
/// floating-point rounding on the diagonal model.
std::pair<double, double> interpolation_norm_identity(
    const orfun::OrFunction& phi0, const orfun::OrFunction& phi1,
    const orfun::PsiParameter& psi, const SpectralOperator& A,
    const CoeffVector& u);

/// slack of (3b.3) at the given tau >= kappa; contract slack >= -1e-10 rel.
double tau_inequality_check(const orfun::OrFunction& phi0,
                            const orfun::OrFunction& phi1,
                            const orfun::PsiParameter& psi,
                            const SpectralOperator& A, const CoeffVector& u,
                            double tau);

SelfTunedSlacks self_tuned_inequalities(const orfun::OrFunction& phi0,
                                        const orfun::OrFunction& phi1,
                                        const orfun::PsiParameter& psi,
                                        const SpectralOperator& A,
                                        const CoeffVector& u);

struct OperatorNormRecord {
  double norm0 = 0, norm1 = 0, norm_interp = 0;
  double nu = 1;          // min of the two spectral ratio infima
  double c_psi_nu = 1;    // certified pseudoconcavity constant
  double ratio = 0;       // ||T||_1 / ||T||_0
  double dilation = 1;    // dilation estimate at `ratio`
  double slack = 0;       // c^2 sqrt(8) ||T||_0 dil - ||T||
  std::size_t argmax0 = 0, argmax1 = 0, argmax = 0;
};

/// Operator-norm interpolational inequality on a shared eigenbasis: T is
/// diagonal, both scales built on the same A.
OperatorNormRecord operator_norm_interpolation(
    const DiagonalMap& T, const orfun::OrFunction& phi0,
    const orfun::OrFunction& phi1, const orfun::OrFunction& eta0,
    const orfun::OrFunction& eta1, const orfun::PsiParameter& psi,
    const SpectralOperator& A);

// JSON wire format: {"lambda": [...]} and {"coeff_re": [...], "coeff_im": [...]}
nlohmann::json to_json(const SpectralOperator& A);
nlohmann::json to_json(const CoeffVector& u);
SpectralOperator spectral_operator_from_json(const nlohmann::json& j);
CoeffVector coeff_vector_from_json(const nlohmann::json& j);

}  // namespace hscale::spectral
