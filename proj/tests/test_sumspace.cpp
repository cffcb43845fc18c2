#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "jfp/errors.hpp"
#include "jfp/fie_solver.hpp"
#include "jfp/mittag_leffler.hpp"
#include "jfp/quadrature.hpp"
#include "jfp/sumspace_bench.hpp"

using namespace jfp;
using mp::Real;
using mp::ScopedPrecision;

TEST_CASE("half-integration operator is tridiagonal") {
  PrecisionContext ctx(256);
  HalfIntegration h = build_halfint(60, ctx);
  CHECK(h.residue <= Real(1e-25));
  RealBanded t = halfint_tridiagonal(60, ctx);
  ScopedPrecision g(256);
  for (std::size_t j = 0; j < 60; ++j) {
    CHECK(h.matrix.get(j, j).is_zero());
    for (std::size_t i = t.col_begin(j); i < t.col_end(j); ++i)
      CHECK(mp::abs(h.matrix.get(i, j) - t.get(i, j)) <= Real(1e-60));
  }
  CHECK_THROWS_AS(build_halfint(7, ctx), DomainError);
  CHECK_THROWS_AS(halfint_tridiagonal(0, ctx), DomainError);
}

TEST_CASE("columns match quadrature integrals") {
  PrecisionContext ctx(128);
  RealBanded t = halfint_tridiagonal(20, ctx);
  ScopedPrecision g(128);
  Real x("0.5");
  // I^{1/2}[1] = 2 sqrt(1+x) / sqrt(pi)
  SumSpaceCoeffs col0;
  col0.N = 20;
  col0.c.assign(20, Real(0));
  for (std::size_t i = 0; i < 20; ++i) col0.c[i] = t.get(i, 0);
  Real closed = 2 * mp::sqrt(x + 1) / mp::sqrt(mp::pi());
  CHECK(mp::abs(sumspace_eval(col0, x) - closed) <= Real(1e-35));
  for (std::size_t j : {3u, 6u, 9u}) {
    SumSpaceCoeffs col;
    col.N = 20;
    col.c.assign(20, Real(0));
    for (std::size_t i = 0; i < 20; ++i) col.c[i] = t.get(i, j);
    long n = static_cast<long>(j / 2);
    bool weighted = j % 2 == 1;
    Real ab = weighted ? Real(1) / 2 : Real(0);
    auto poly = [&](const Real& s) { return jacobi_eval_all(ab, ab, n, s).back(); };
    Real q = frac_integral_quad(poly, Real(1) / 2, weighted ? Real(1) / 2 : Real(0), 1, x, 40, ctx);
    CHECK(mp::abs(sumspace_eval(col, x) - q) <= Real(1e-30));
  }
}

TEST_CASE("applying the half integral twice integrates once") {
  PrecisionContext ctx(128);
  RealBanded t = halfint_tridiagonal(40, ctx);
  ScopedPrecision g(128);
  RealBanded t2 = t * t;
  for (std::size_t n = 0; n < 15; ++n) {
    std::size_t col = 2 * n;
    // integral of P_n from -1 is (P_{n+1} - P_{n-1}) / (2n+1), and 1 + x for n = 0
    for (std::size_t k = 0; k < 18; ++k) {
      Real expect(0);
      if (n == 0 && k <= 1) expect = Real(1);
      if (n > 0 && k == n + 1) expect = Real(1) / Real(static_cast<long>(2 * n + 1));
      if (n > 0 && k + 1 == n) expect = Real(-1) / Real(static_cast<long>(2 * n + 1));
      CHECK(mp::abs(t2.get(2 * k, col) - expect) <= Real(1e-35));
      CHECK(mp::abs(t2.get(2 * k + 1, col)) <= Real(1e-35));
    }
  }
}

TEST_CASE("tridiagonal solves") {
  PrecisionContext ctx(128);
  SumSpaceCoeffs zero = sumspace_solve(Real(0), 10, ctx);
  CHECK(zero.c[0] == Real(1));
  for (std::size_t i = 1; i < 10; ++i) CHECK(zero.c[i].is_zero());
  CHECK(zero.legendre().size() == 5);
  CHECK(zero.weighted().size() == 5);
  CHECK_THROWS_AS(sumspace_solve(Real(-1), 10, ctx), DomainError);

  // lambda = 1 has a vanishing pivot without row exchanges
  SumSpaceCoeffs one = sumspace_solve(Real(1), sumspace_auto_n(1), ctx);
  for (double x : {-1.0, -0.3, 0.4, 1.0})
    CHECK(std::abs(sumspace_eval(one, Real(x)).to_double() - ml_solution(Param(1, 2), Param(1), 1.0, x)) <= 1e-14);
}

TEST_CASE("sum-space coefficients grow super-exponentially") {
  CHECK(sumspace_reference_bits(2) == 111);
  CHECK(sumspace_reference_bits(4) == 803);
  double prev = 0;
  for (double lambda : {2.0, 3.0}) {
    SumSpaceCoeffs s = sumspace_solve(Real(lambda), sumspace_auto_n(lambda), PrecisionContext(sumspace_reference_bits(lambda)));
    double expect = 2 * std::pow(lambda, 4) / std::log(10.0);
    CHECK(std::abs(s.log10_max() - std::round(expect)) <= 1.0);
    CHECK(s.log10_max() > 4 * prev);
    prev = s.log10_max();
    // double precision loses the solution
    SumSpaceCoeffs d = sumspace_solve(Real(lambda), sumspace_auto_n(lambda), PrecisionContext(53));
    double err = 0;
    for (double x : grid(0.01))
      err = std::max(err, std::abs(sumspace_eval(d, Real(x)).to_double() -
                                   ml_solution(Param(1, 2), Param(1), lambda * lambda, x)));
    CHECK(err > 1e-2);
  }
}

TEST_CASE("high-precision sum space agrees with the JFP solution") {
  for (double lambda : {1.0, 2.0, 3.0}) {
    SumSpaceCoeffs s = sumspace_solve(Real(lambda), sumspace_auto_n(lambda), PrecisionContext(sumspace_reference_bits(lambda)));
    FIEProblem p = mittag_leffler_problem(Param(1, 2), std::to_string(lambda * lambda));
    SolutionFunction j = solve(p, select_basis(p), 80);
    for (int i = 0; i <= 20; ++i) {
      double x = -1 + 0.1 * i;
      CHECK(std::abs(sumspace_eval(s, Real(x)).to_double() - solution_value(j, x)) <= 1e-10);
    }
  }
}

TEST_CASE("sum-space condition number plateaus") {
  PrecisionContext ctx(sumspace_reference_bits(2));
  double c80 = sumspace_log10_condition(Real(2), 80, ctx);
  double c160 = sumspace_log10_condition(Real(2), 160, ctx);
  CHECK(std::pow(10.0, c160 - c80) < 1.01);
  CHECK(std::abs(c160 - 32 / std::log(10.0)) <= 1.0);
  CHECK(sumspace_log10_condition(Real(0), 10, ctx) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("truncation sizes") {
  CHECK(truncation_size({1, 0.1, 1e-15, 1e-13, 1e-16}, 1e-14) == 4);
  CHECK(truncation_size({1e-20}, 1e-14) == 0);
  CHECK(sumspace_auto_n(0) == 16);
  CHECK(sumspace_auto_n(2) % 2 == 0);
  CHECK(sumspace_auto_n(3) > 3 * sumspace_auto_n(2));
}

TEST_CASE("comparison report") {
  CompareOptions opts;
  opts.jfp_n = 60;
  auto rows = compare_report({1.0, 2.0}, opts);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].sumspace_double_error > 1e-2);
  CHECK(rows[0].sumspace_double_error < 1e-12);
  for (const auto& r : rows) {
    CHECK(r.jfp_max_coeff < 1);
    CHECK(r.jfp_error < 1e-13);
    CHECK(r.jfp_truncation <= 60);
  }
  CHECK(rows[1].sumspace_log10_max_coeff > 12);
  std::string csv = comparison_csv(rows);
  CHECK(csv.rfind("# jfp sumspace comparison v1\nlambda,sumspace_n,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv == comparison_csv(compare_report({1.0, 2.0}, opts)));

  CompareOptions skip;
  skip.jfp_n = 40;
  skip.max_bits = 64;
  skip.conditions = false;
  auto r = compare_report({2.0}, skip);
  CHECK(std::isnan(r[0].sumspace_log10_max_coeff));
  CHECK_THROWS_AS(compare_report({-1.0}), DomainError);
}

TEST_CASE("Legendre coefficients match the monomial series") {
  // a_k = sum_{n >= k} z^n (2k+1) n! / ((n-k)! (n+k+1)!), z = 2 lambda^4
  double lambda = 2;
  PrecisionContext ctx(sumspace_reference_bits(lambda) + 64);
  SumSpaceCoeffs s = sumspace_solve(Real(lambda), sumspace_auto_n(lambda, 1e-30), ctx);
  ScopedPrecision g(ctx.q);
  std::vector<Real> a = s.legendre();
  Real z(2 * std::pow(lambda, 4));
  for (long k : {0L, 5L, 20L, 40L}) {
    Real term = mp::exp(Real(k) * mp::log(z) + lgamma(Real(k + 1)) - lgamma(Real(2 * k + 2))) * Real(2 * k + 1);
    Real sum = term;
    for (long n = k; n < 600; ++n) {
      term *= z * Real(n + 1) / (Real(n + 1 - k) * Real(n + k + 2));
      sum += term;
    }
    CHECK(mp::abs(a[static_cast<std::size_t>(k)] - sum) <= mp::abs(sum) * Real(1e-25));
  }
}
