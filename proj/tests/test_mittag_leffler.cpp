#include <doctest.h>

#include <cmath>

#include "jfp/errors.hpp"
#include "jfp/mittag_leffler.hpp"
#include "jfp/quadrature.hpp"

using namespace jfp;
using mp::Real;
using mp::ScopedPrecision;

TEST_CASE("classical special cases") {
  ScopedPrecision g(128);
  CHECK(std::abs(ml_eval(MLParams::checked(1, 1), -3.0) - std::exp(-3.0)) <= 1e-15);
  Real series = ml_series(MLParams::checked(1, 1), Real(-3), 1e-30);
  CHECK(mp::abs(series - mp::exp(Real(-3))) <= Real(1e-30));
  Real wave = ml_series(MLParams::checked(2, 1), Real(-4), 1e-30);
  CHECK(mp::abs(wave - mp::cos(Real(2))) <= Real(1e-30));
  CHECK(std::abs(ml_eval(MLParams::checked(2, 1), -4.0) - std::cos(2.0)) <= 1e-15);
  CHECK(std::abs(ml_eval(MLParams::checked(2, 1), 4.0) - std::cosh(2.0)) <= 1e-14);
}

TEST_CASE("half-order function against the complementary error function") {
  ScopedPrecision g(128);
  // lambda = 3, x = 0: s = lambda^2 sqrt(1 + x) = 9
  Real s(9);
  Real closed = mp::exp(s * s) * erfc(s);
  Real series = ml_series(MLParams::checked(Param(1, 2), 1), -s, 1e-25);
  CHECK(mp::abs(series - closed) <= Real(1e-25) * closed);
  CHECK(mp::abs(ml_eval(MLParams::checked(Param(1, 2), 1), -s, 1e-25) - closed) <= Real(1e-25) * closed);
  double u = ml_solution(Param(1, 2), 1, 9.0, 0.0);
  CHECK(std::abs(u - closed.to_double()) <= 1e-15 * closed.to_double());
}

TEST_CASE("degenerate solutions") {
  ScopedPrecision g(128);
  for (double x : {-0.5, 0.0, 0.7}) {
    double v = ml_solution(Param(1, 3), Param(3, 2), 0.0, x);
    CHECK(std::abs(v - std::sqrt(1 + x) / std::tgamma(1.5)) <= 1e-15);
  }
  CHECK(ml_solution(Param(1, 2), 1, 2.0, -1.0) == 1.0);
  CHECK(ml_solution(Param::parse("1/pi"), 1, 1.0, -1.0) == 1.0);
}

TEST_CASE("monomial coefficient partial sums converge to the solution") {
  ScopedPrecision g(128);
  Param mu(1, 2), nu(1);
  Real x("0.5");
  auto c = ml_monomial_coeffs(mu, nu, Real(1), 80);
  Real t = mp::pow((x + 1) / 2, mu.to_real());
  Real sum(0), tk(1);
  Real exact = ml_solution(mu, nu, Real(1), x, 1e-30);
  Real prev_err(1e9);
  for (std::size_t k = 0; k < c.size(); ++k) {
    sum += c[k] * tk;
    tk *= t;
    if (k % 10 == 9) {
      Real err = mp::abs(sum - exact);
      CHECK(err <= prev_err);
      prev_err = err;
    }
  }
  CHECK(prev_err <= Real(1e-30));
}

TEST_CASE("solutions satisfy their integral equations") {
  struct Case {
    Param mu, nu;
    double lambda;
    long root;
  };
  PrecisionContext ctx(128);
  ScopedPrecision g(128);
  for (const Case& c : {Case{Param(1, 2), 1, 1.0, 2}, Case{Param(1, 3), Param(3, 2), 1.0, 3},
                        Case{Param(2, 3), Param(1, 2), 2.0, 3}, Case{Param(1), Param(1), 1.5, 1}}) {
    Real mu = c.mu.to_real(), sigma = c.nu.to_real() - 1;
    MLParams p = MLParams::checked(c.mu, c.nu);
    Real lam(c.lambda);
    auto smooth = [&](const Real& t) { return ml_eval(p, -lam * mp::pow(t + 1, mu), 1e-30); };
    for (Real x : {Real("-0.5"), Real(0), Real("0.7")}) {
      Real u = ml_solution(c.mu, c.nu, lam, x, 1e-30);
      Real iu = frac_integral_quad(smooth, mu, sigma, c.root, x, 40, ctx);
      Real residual = u + lam * iu - mp::pow(x + 1, sigma) / gamma(c.nu.to_real());
      CHECK(mp::abs(residual) <= Real(1e-10));
    }
  }
}

TEST_CASE("refining the accuracy does not move the value") {
  ScopedPrecision g(128);
  for (auto [a, b] : {std::pair{Param(1, 3), Param(1)}, {Param(3, 4), Param(5, 4)}, {Param(3, 2), Param(1)}})
    for (double z : {-6.0, -1.0, 0.5, 3.0}) {
      MLParams p = MLParams::checked(a, b);
      Real v1 = ml_eval(p, Real(z), 1e-20);
      Real v2 = ml_eval(p, Real(z), 1e-22);
      CHECK(mp::abs(v1 - v2) <= Real(1e-20) * mp::max(Real(1), mp::abs(v2)));
    }
}

TEST_CASE("argument checks and the precision cap") {
  ScopedPrecision g(64);
  CHECK_THROWS_AS(MLParams::checked(0, 1), DomainError);
  CHECK_THROWS_AS(MLParams::checked(1, Param(-1, 2)), DomainError);
  CHECK_THROWS_AS(ml_series(MLParams::checked(Param(3, 2), 1), Real(-1e8), 1e-15), ConvergenceError);
  CHECK_THROWS_AS(ml_series(MLParams::checked(1, 1), Real(1), 2.0), DomainError);
}

TEST_CASE("algebraic expansion for large negative arguments") {
  ScopedPrecision g(128);
  // against the erfc closed form
  for (double z : {-40.0, -200.0}) {
    Real series = ml_series(MLParams::checked(Param(1, 2), 1), Real(z), 1e-30);
    Real closed = ml_eval(MLParams::checked(Param(1, 2), 1), Real(z), 1e-30);
    CHECK(mp::abs(series - closed) <= Real(1e-30));
  }
  // against a direct power series at very high precision
  {
    ScopedPrecision hi(4000);
    // Gamma((k+3)/3 + 1) = (k/3 + 1) Gamma(k/3 + 1)
    Real z(-10), z3 = z * z * z, sum(0);
    for (long r = 0; r < 3; ++r) {
      Real term = mp::pow(z, Real(r)) / gamma(Real(r) / 3 + 1);
      for (long k = r; k < 12000; k += 3) {
        sum += term;
        term *= z3 / (Real(k) / 3 + 1);
      }
    }
    ScopedPrecision lo(128);
    Real v = ml_eval(MLParams::checked(Param(1, 3), 1), Real(-10), 1e-25);
    CHECK(mp::abs(v - sum) <= Real(1e-25));
  }
  // 1 / Gamma(1 - k/5) vanishes at k = 5, 10, ...
  double big = ml_eval(MLParams::checked(Param(1, 5), 1), -31.0);
  CHECK(big == doctest::Approx(1.0 / (31.0 * std::tgamma(0.8)) - 1.0 / (961.0 * std::tgamma(0.6))).epsilon(1e-4));
}
