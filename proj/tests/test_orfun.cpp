#include <doctest.h>

#include <cmath>
#include <vector>

#include "hscale/lab.hpp"
#include "hscale/orfun.hpp"
#include "hscale/samplers.hpp"

using namespace hscale;
using orfun::OrFunction;
using orfun::PsiParameter;

namespace {

// palette of combinators used by several property tests
std::vector<OrFunction> palette() {
  return {
      OrFunction::power(2),
      OrFunction::power(-1.5),
      OrFunction::logp(1),
      OrFunction::logp(3),
      OrFunction::loglogp(0.5),
      OrFunction::logstar(),
      OrFunction::constant(5),
      OrFunction::product(OrFunction::power(1), OrFunction::logp(3)),
      OrFunction::quotient(OrFunction::power(1), OrFunction::logp(2)),
      OrFunction::rescale(OrFunction::logp(1), 0.5),
      OrFunction::tabulated({1, 10, 100, 1000}, {1, 2, 3.5, 8}),
  };
}

}  // namespace

TEST_CASE("combinator evaluation") {
  CHECK(OrFunction::power(2)(3.0) == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(OrFunction::logp(1)(1.0) == doctest::Approx(1.0));
  CHECK(OrFunction::logstar()(2.0) == doctest::Approx(1.0));  // log 2 < 1
  CHECK(OrFunction::logstar()(std::exp(2.0)) == doctest::Approx(2.0));
  CHECK(OrFunction::loglogp(2)(1.0) == doctest::Approx(1.0));
  CHECK(OrFunction::constant(5)(123.0) == doctest::Approx(5.0));
  CHECK(OrFunction::rescale(OrFunction::power(2), 0.5)(16.0) ==
        doctest::Approx(16.0));
  CHECK_THROWS_AS(OrFunction::power(1)(0.5), std::domain_error);
}

TEST_CASE("tabulated validation and interpolation") {
  CHECK_THROWS_AS(OrFunction::tabulated({2, 3}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(OrFunction::tabulated({1, 1}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(OrFunction::tabulated({1, 2}, {1, -1}), std::invalid_argument);
  CHECK_THROWS_AS(OrFunction::tabulated({1}, {1}), std::invalid_argument);

  auto f = OrFunction::tabulated({1, 100}, {1, 10});
  // log-linear between knots: f(10) = sqrt(10)
  CHECK(f(10.0) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
  // power-law extrapolation from the last two knots: slope 1/2 in log-log
  CHECK(f(10000.0) == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("positivity on the grid") {
  for (const auto& f : palette())
    for (double t : orfun::log_grid(1.0, 1e6, 64)) CHECK(f(t) > 0);
}

TEST_CASE("or-membership certificate") {
  CHECK(orfun::verify_or_membership(OrFunction::power(2), 2.0) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(orfun::verify_or_membership(OrFunction::power(-1.5), 2.0) ==
        doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-12));
  CHECK(orfun::verify_or_membership(OrFunction::constant(5), 2.0) ==
        doctest::Approx(1.0));

  // brute-force oracle over the same grid, through the plain eval path
  auto f = OrFunction::product(OrFunction::power(1), OrFunction::logp(3));
  const orfun::RatioGrid grid{};
  double oracle = 1.0;
  for (int i = 0; i < grid.t_count; ++i) {
    const double t = std::exp(std::log(grid.t_max) * i / (grid.t_count - 1));
    for (int j = 1; j < grid.lambda_count; ++j) {
      const double lam = std::exp(std::log(2.0) * j / (grid.lambda_count - 1));
      const double r = f(lam * t) / f(t);
      oracle = std::max({oracle, r, 1 / r});
    }
  }
  CHECK(orfun::verify_or_membership(f, 2.0) ==
        doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("matuszewska indices") {
  for (double s : {-2.0, 0.0, 0.5, 3.0}) {
    auto e = orfun::matuszewska_indices(OrFunction::power(s));
    CHECK(e.sigma0 == doctest::Approx(s).epsilon(0.05));
    CHECK(e.sigma1 == doctest::Approx(s).epsilon(0.05));
    CHECK(!e.inconclusive);
    CHECK(e.residual == doctest::Approx(0.0).epsilon(1e-9));
  }
  auto e1 = orfun::matuszewska_indices(
      OrFunction::product(OrFunction::power(1), OrFunction::logp(3)));
  CHECK(std::abs(e1.sigma0 - 1.0) <= 0.05);
  CHECK(std::abs(e1.sigma1 - 1.0) <= 0.05);
  auto e2 = orfun::matuszewska_indices(OrFunction::logstar());
  CHECK(std::abs(e2.sigma0) <= 0.05);
  CHECK(std::abs(e2.sigma1) <= 0.05);

  // sigma0 <= sigma1 for everything in the palette
  for (const auto& f : palette()) {
    auto e = orfun::matuszewska_indices(f);
    CHECK(e.sigma0 <= e.sigma1 + 1e-9);
    CHECK(e.residual >= 0);
  }
}

TEST_CASE("interpolation membership") {
  CHECK(orfun::interpolation_membership(OrFunction::power(1), 0, 2).member);
  CHECK_FALSE(
      orfun::interpolation_membership(OrFunction::power(1), 2, 3).member);
  // boundary case: phi = 1 + log t admits s0 = 0 with any s1 > 0
  CHECK(orfun::interpolation_membership(OrFunction::logp(1), 0, 0.1).member);
  CHECK_THROWS_AS(orfun::interpolation_membership(OrFunction::power(1), 2, 2),
                  std::invalid_argument);
}

TEST_CASE("interpolation parameter construction") {
  const double eps = 0.1;
  auto psi = orfun::make_interpolation_parameter(OrFunction::logp(1), 0, eps);
  for (double tau : {1.0, 2.0, 10.0, 1e4})
    CHECK(psi(tau) ==
          doctest::Approx(1 + std::log(tau) / eps).epsilon(1e-13));
  CHECK(psi(0.5) == doctest::Approx(1.0));  // left branch is phi(1)

  auto psi2 = orfun::make_interpolation_parameter(OrFunction::power(2), 1, 3);
  CHECK(psi2(9.0) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(psi2.power_exponent().has_value());
  CHECK(*psi2.power_exponent() == doctest::Approx(0.5));

  CHECK_THROWS_AS(orfun::make_interpolation_parameter(OrFunction::power(1), 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(orfun::make_interpolation_parameter(OrFunction::power(1), 2, 3),
                  PreconditionError);
}

TEST_CASE("compose with a function parameter") {
  // power/power/power: phi = t^((1-theta) s0 + theta s1)
  const double s0 = -1, s1 = 2, theta = 0.25;
  auto comp = orfun::compose_parameterized(
      OrFunction::power(s0), OrFunction::power(s1),
      PsiParameter(OrFunction::power(theta)));
  auto expect = OrFunction::power((1 - theta) * s0 + theta * s1);
  for (double t : orfun::log_grid(1.0, 1e6, 64))
    CHECK(comp(t) == doctest::Approx(expect(t)).epsilon(1e-12));

  // psi == 1 collapses to phi0
  auto id = orfun::compose_parameterized(OrFunction::logp(2),
                                         OrFunction::power(1),
                                         PsiParameter(OrFunction::constant(1)));
  for (double t : orfun::log_grid(1.0, 1e6, 64))
    CHECK(id(t) == doctest::Approx(OrFunction::logp(2)(t)).epsilon(1e-13));

  // boundedness hypothesis violated: f0/f1 blows past 1e6
  CHECK_THROWS_AS(orfun::compose_parameterized(
                      OrFunction::power(3), OrFunction::power(1),
                      PsiParameter(OrFunction::power(0.5))),
                  PreconditionError);
}

TEST_CASE("round trip between parameter construction and composition") {
  // 20 combinators with admissible exponent windows around their order
  lab::Rng rng(17);
  int tested = 0;
  while (tested < 20) {
    double s = 0;
    OrFunction f = lab::sample_or_function(rng, &s);
    const double s0 = s - rng.uniform(0.6, 1.4);
    const double s1 = s + rng.uniform(0.6, 1.4);
    auto psi = orfun::make_interpolation_parameter(f, s0, s1);
    auto back = orfun::compose_parameterized(OrFunction::power(s0),
                                             OrFunction::power(s1), psi);
    for (double t : orfun::log_grid(1.0, 1e6, 64))
      CHECK(back(t) == doctest::Approx(f(t)).epsilon(1e-12));
    ++tested;
  }
}

TEST_CASE("pseudoconcavity constant") {
  // any power theta in (0,1): exactly 1
  CHECK(orfun::pseudoconcavity_constant(PsiParameter(OrFunction::power(0.5)),
                                        1e-6) == doctest::Approx(1.0));
  // concave positive increasing psi: 1 + log tau
  CHECK(orfun::pseudoconcavity_constant(PsiParameter(OrFunction::logp(1)),
                                        1e-6) ==
        doctest::Approx(1.0).epsilon(1e-10));

  // brute-force O(n^2) oracle on a small grid vs the scan implementation
  auto psi = orfun::make_interpolation_parameter(OrFunction::logp(1), 0, 1);
  const auto grid = orfun::log_grid(0.5, 1e4, 200);
  double oracle = 1;
  for (double t : grid)
    for (double tau : grid)
      oracle = std::max(oracle, psi(t) / (psi(tau) * std::max(1.0, t / tau)));
  CHECK(orfun::pseudoconcavity_constant(psi, grid) ==
        doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("least concave majorant") {
  // concave input: the hull passes through every sample
  std::vector<std::pair<double, double>> conc;
  for (int i = 0; i <= 20; ++i) {
    const double x = 1 + i * 0.5;
    conc.push_back({x, std::sqrt(x)});
  }
  auto hull = orfun::least_concave_majorant(conc);
  for (const auto& [x, y] : conc)
    CHECK(hull(x) == doctest::Approx(y).epsilon(1e-12));

  // convex input tau^2: the chord between the endpoints
  std::vector<std::pair<double, double>> conv;
  for (int i = 0; i <= 10; ++i) {
    const double x = 0.1 + i * 0.09;
    conv.push_back({x, x * x});
  }
  auto chord = orfun::least_concave_majorant(conv);
  CHECK(chord.x.size() == 2);
  const double xm = 0.5 * (conv.front().first + conv.back().first);
  const double expected = conv.front().second +
                          (conv.back().second - conv.front().second) *
                              (xm - conv.front().first) /
                              (conv.back().first - conv.front().first);
  CHECK(chord(xm) == doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(orfun::least_concave_majorant({{1.0, 1.0}}),
                  std::invalid_argument);

  // sandwich: chi <= chi1 <= 2 c^2 chi for chi(tau) = psi^2(sqrt tau)
  auto psi = orfun::make_interpolation_parameter(OrFunction::logp(1), 0, 1);
  std::vector<std::pair<double, double>> samples;
  for (double tau : orfun::log_grid(1.0, 1e6, 128)) {
    const double v = psi(std::sqrt(tau));
    samples.push_back({tau, v * v});
  }
  const double c = orfun::pseudoconcavity_constant(psi, 1.0);
  auto maj = orfun::least_concave_majorant(samples);
  for (const auto& [x, y] : samples) {
    CHECK(maj(x) >= y * (1 - 1e-12));
    CHECK(maj(x) <= 2 * c * c * y * (1 + 1e-12));
  }
}

TEST_CASE("majorant is concave and dominates random samples") {
  lab::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<double, double>> samples;
    double x = 0.1;
    for (int i = 0; i < 40; ++i) {
      x += rng.uniform(0.01, 1.0);
      samples.push_back({x, rng.uniform(0.1, 10.0)});
    }
    auto hull = orfun::least_concave_majorant(samples);
    for (const auto& [sx, sy] : samples) CHECK(hull(sx) >= sy * (1 - 1e-12));
    for (std::size_t i = 0; i + 2 < hull.x.size(); ++i) {
      const double sl0 =
          (hull.y[i + 1] - hull.y[i]) / (hull.x[i + 1] - hull.x[i]);
      const double sl1 =
          (hull.y[i + 2] - hull.y[i + 1]) / (hull.x[i + 2] - hull.x[i + 1]);
      CHECK(sl1 <= sl0 + 1e-9 * std::max(1.0, std::abs(sl0)));
    }
  }
}

TEST_CASE("dilation function") {
  PsiParameter pow_psi(OrFunction::power(0.5));
  CHECK(orfun::dilation_function(pow_psi, 4.0) ==
        doctest::Approx(2.0).epsilon(1e-12));
  PsiParameter log_psi(OrFunction::logp(1));
  CHECK(orfun::dilation_function(log_psi, 1.0) == doctest::Approx(1.0));

  // brute force over the same default grid
  const auto grid = orfun::log_grid(1e-6, 1e6, 513);
  double oracle = 0;
  for (double t : grid) {
    const double num = log_psi(std::max(10.0 * t, 1e-300));
    oracle = std::max(oracle, num / log_psi(t));
  }
  CHECK(orfun::dilation_function(log_psi, 10.0) ==
        doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("pseudoconcavity of constructed parameters stays finite") {
  lab::Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    double s = 0;
    OrFunction f = lab::sample_or_function(rng, &s);
    auto psi = orfun::make_interpolation_parameter(f, s - 1, s + 1);
    const double c = orfun::pseudoconcavity_constant(psi, 1.0);
    CHECK(std::isfinite(c));
    CHECK(c >= 1.0);
    CHECK(c < 1e3);
  }
}
