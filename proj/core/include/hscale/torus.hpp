#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hscale/analysis.hpp"
#include "hscale/orfun.hpp"
#include "hscale/spectral.hpp"

namespace hscale::torus {

using Complex = std::complex<double>;
using Mode = std::array<int, 3>;  // unused trailing axes stay 0

/// Modes of the cube |k_i| <= M ordered by nu = (1+|k|^2)^(1/2),
/// ties broken lexicographically ascending on k.
struct EigenEnumeration {
  int n = 1;
  int M = 1;
  std::vector<Mode> modes;         // enumeration position j (0-based) -> k
  std::vector<double> nu;          // nu_j, nondecreasing
  std::vector<std::int64_t> flat;  // j -> flat cube index

  static EigenEnumeration build(int n, int M);
  std::size_t total() const { return modes.size(); }

  struct WeylBracket {
    double lo = 0, hi = 0;  // min/max of nu_j / j^(1/n) over 1-based j >= 2
  };
  WeylBracket weyl_bracket() const;
};

/// Trigonometric polynomial on T^n: dense coefficient cube |k_i| <= M.
class TorusField {
 public:
  TorusField(int n, int M);

  int dim() const { return n_; }
  int cutoff() const { return M_; }
  std::size_t total() const { return c_.size(); }

  Complex mode(const Mode& k) const { return c_[flat_index(k)]; }
  void set_mode(const Mode& k, Complex v) { c_[flat_index(k)] = v; }

  const std::vector<Complex>& coeffs() const { return c_; }
  std::vector<Complex>& coeffs() { return c_; }

  std::size_t flat_index(const Mode& k) const;

 private:
  int n_, M_;
  std::vector<Complex> c_;
};

// synthesis profiles
struct SingleMode {
  Mode k{0, 0, 0};
  Complex c{1, 0};
};
struct RadialDecay {
  orfun::OrFunction phi;
  double delta = 0.5;  // coefficients (phi(nu_j))^-1 j^-(1+delta)/2
};
struct RandomInBall {
  orfun::OrFunction phi;
  std::uint64_t seed = 0;
  double radius = 1.0;  // exact ||f||_phi after scaling
  double envelope = 1.0;  // gaussian coefficients damped by j^-(1+envelope)/2
};
using Profile = std::variant<SingleMode, RadialDecay, RandomInBall>;

TorusField synthesize_field(int n, int M, const Profile& profile,
                            const EigenEnumeration& e);
TorusField synthesize_field(int n, int M, const Profile& profile);

double field_norm(const TorusField& f, const orfun::OrFunction& phi,
                  spectral::NormScheme scheme, const EigenEnumeration& e);
double field_norm(const TorusField& f, const orfun::OrFunction& phi,
                  spectral::NormScheme scheme = spectral::NormScheme::Eigen);

/// Keeps the first `count` coefficients in enumeration order (or in the
/// order E-position perm[0], perm[1], ... when perm is given), zeros the rest.
TorusField partial_sum(const TorusField& f, std::size_t count,
                       const EigenEnumeration& e,
                       const std::vector<std::int32_t>* perm = nullptr);

/// Samples on the uniform grid x_g = 2 pi g / G per axis, flat row-major.
std::vector<Complex> sample_grid(const TorusField& f, int grid_per_axis);

/// Direct DFT of grid samples back to the coefficient cube; exact for
/// G >= 2M+1. This is the oracle path for spectral coefficients.
TorusField coefficients_from_samples(const std::vector<Complex>& samples,
                                     int n, int M, int grid_per_axis);

/// Grid C^q distance: sum over |alpha| <= q of the grid max of
/// |d^alpha (f-g)|, derivatives taken spectrally. Lower bound of the true
/// C^q norm; grid_per_axis < 2M+1 is rejected (aliasing).
double sup_error(const TorusField& f, const TorusField& g, int q,
                 int grid_per_axis);

struct RateRow {
  std::size_t k;
  double error;     // measured C^q grid error of the k-term partial sum
  double bound;     // ||f||_phi * sup_{j>k} 1/phi1(j^(1/n)) * theta_k
  double ratio;     // error / bound
  double theta;     // tail fraction of the diagonal preimage
  double degree;    // sup_{j>k} 1/phi1(j^(1/n))
  double l1_bound;  // l1 mass of the C^q tail coefficients (upper envelope)
};
struct RateResult {
  std::vector<RateRow> rows;
  double c_star = 0;     // max ratio
  double norm_phi = 0;   // ||f||_phi (eigen scheme)
  int grid_per_axis = 0;
};

/// Degree-of-convergence experiment: measured errors against the
/// phi1-degree bound. phi2 must pass the criterion integral; phi1 must be
/// grid-unbounded. Both are re-certified here.
RateResult rate_experiment(const orfun::OrFunction& phi1,
                           const orfun::OrFunction& phi2, const TorusField& f,
                           int q, const std::vector<std::size_t>& ks,
                           int grid_per_axis = 0);

struct ProbeResult {
  std::vector<double> eps_levels;
  // k_at_level[p][l]: first k reaching level l under permutation p
  // (p = 0 is the sorted order); -1 marks a truncation artifact.
  std::vector<std::vector<std::int64_t>> k_at_level;
  std::vector<double> final_residual;  // C^q grid error at k = total
  std::uint64_t seed = 0;
  analysis::Verdict criterion;
};

/// Unconditional-convergence protocol: the sorted order plus num_perms
/// seeded shuffles; requires the criterion integral to converge.
ProbeResult unconditional_probe(const TorusField& f,
                                const orfun::OrFunction& phi, int q,
                                int num_perms, std::uint64_t seed,
                                const std::vector<double>& eps_levels,
                                int grid_per_axis = 0);

struct AeDiagnostics {
  double majorant_l2 = 0;   // ||S*(f,.)|| on the grid, measure normalized to 1
  double mr_sum = 0;        // sum log^2(j+1) |x_j|^2
  double orlicz_weighted = 0;   // sum_{j>=2} log^2(j) w_j |x_j|^2
  double orlicz_condition = 0;  // condition sum within the cube
  double norm_logstar = 0;      // index-scheme ||f||_log*
  double fitted_c = 0;          // majorant_l2 / norm_logstar
};

AeDiagnostics ae_diagnostics(const TorusField& f,
                             const orfun::OrFunction& phi,
                             int grid_per_axis = 0);

struct SeriesGrowth {
  std::vector<std::pair<std::size_t, double>> checkpoints;  // dyadic partials
  bool strictly_increasing = false;
  double last_doubling_growth = 0;  // relative growth over the last doubling
};

/// Partial sums of the Orlicz condition series
/// sum_{j>=3} 1 / (j log j phi^2(j^(1/n))) up to j_max terms.
SeriesGrowth orlicz_condition_series(const orfun::OrFunction& phi, int n,
                                     std::size_t j_max);

// JSON wire format: {n, M, modes: [{k: [...], re, im}]}; omitted modes = 0.
nlohmann::json to_json(const TorusField& f);
TorusField torus_field_from_json(const nlohmann::json& j);

}  // namespace hscale::torus
