#include <doctest.h>

#include <cmath>
#include <vector>

#include "jfp/errors.hpp"
#include "jfp/frac_ops.hpp"
#include "jfp/jfp_basis.hpp"

using namespace jfp;
using mp::Real;
using mp::ScopedPrecision;

namespace {

const long kBits = 256;

JFPParams legendre_p(long p) { return JFPParams::checked(Param(0), Param(0), Param(0), Param(p)); }

/// Q_0..Q_{n-1} at x by direct evaluation.
std::vector<Real> basis_values(const JFPParams& params, long n, const Real& x, const PrecisionContext& ctx) {
  std::vector<Real> out;
  for (long j = 0; j < n; ++j) out.push_back(jfp_eval(params, j, x, ctx));
  return out;
}

/// sum_i Q_i(x) M(i, j).
template <class M>
Real combine(const std::vector<Real>& q, const M& m, std::size_t j) {
  Real s(0);
  for (std::size_t i = 0; i < q.size() && i < m.rows(); ++i) s += q[i] * m.get(i, j);
  return s;
}

Real max_abs_diff(const RealMatrix& a, const RealMatrix& b, std::size_t rows, std::size_t cols) {
  Real m(0);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m = mp::max(m, mp::abs(a(i, j) - b(i, j)));
  return m;
}

}  // namespace

TEST_CASE("variable map endpoints and closed form") {
  ScopedPrecision g(kBits);
  for (long p : {1L, 2L, 3L, 7L}) {
    Real pr(p);
    CHECK(map_to_y(Real(-1), pr) == Real(-1));
    CHECK(map_to_y(Real(1), pr) == Real(1));
    CHECK(map_to_x(Real(-1), pr) == Real(-1));
    CHECK(map_to_x(Real(1), pr) == Real(1));
  }
  Real y = map_to_y(Real(0), Real(2));
  CHECK(mp::abs(y - (mp::sqrt(Real(2)) - 1)) <= 4 * eps_real(kBits));
}

TEST_CASE("variable map round trip within 4 ulp") {
  ScopedPrecision g(kBits);
  for (Real p : {Real(2), Real(3), Real(5), mp::pi(), Real("0.75")})
    for (long k = -100; k <= 100; ++k) {
      Real x = Real(k) / 100;
      Real back = map_to_x(map_to_y(x, p), p);
      CHECK(mp::abs(back - x) <= 4 * eps_real(kBits));
    }
}

TEST_CASE("JFP evaluation reduces to Jacobi evaluation") {
  PrecisionContext ctx(kBits);
  ScopedPrecision g(kBits);
  JFPParams plain = JFPParams::checked(Param(1, 2), Param(-1, 2), Param(0), Param(1));
  for (Real x : {Real("-0.7"), Real(0), Real("0.3"), Real(1)}) {
    for (long n = 0; n < 8; ++n) CHECK(jfp_eval(plain, n, x, ctx) == jacobi_eval(plain.jacobi, n, x, ctx));
    CHECK(jfp_eval(legendre_p(3), 0, x, ctx) == Real(1));
  }
  Real v = jfp_eval(legendre_p(2), 1, Real(0), ctx);
  CHECK(mp::abs(v - (mp::sqrt(Real(2)) - 1)) <= 4 * eps_real(kBits));
}

TEST_CASE("JFP evaluation applies the weight after the polynomial") {
  PrecisionContext ctx(kBits);
  ScopedPrecision g(kBits);
  JFPParams params = JFPParams::checked(Param(0), Param(1), Param(3, 2), Param(3));
  for (Real x : {Real("-0.9"), Real("0.2"), Real("0.8")}) {
    Real y = map_to_y(x, Real(3));
    Real expect = mp::pow(y + 1, Real(3) / 2) * jacobi_eval(params.jacobi, 4, y, ctx);
    CHECK(mp::abs(jfp_eval(params, 4, x, ctx) - expect) <= 16 * eps_real(kBits));
  }
  CHECK(jfp_eval(params, 2, Real(-1), ctx).is_zero());
}

TEST_CASE("negative weight exponent is singular at the left endpoint") {
  PrecisionContext ctx(kBits);
  ScopedPrecision g(kBits);
  JFPParams params = JFPParams::checked(Param(-1, 2), Param(-1, 2), Param(-1, 2), Param(3));
  CHECK_THROWS_AS(jfp_eval(params, 1, Real(-1), ctx), DomainError);
  CHECK_THROWS_AS(jfp_sum(params, std::vector<double>{1.0, 2.0}, -1.0), DomainError);
  CHECK(jfp_eval(params, 1, Real("-0.99"), ctx).is_finite());
}

TEST_CASE("double and multiprecision JFP sums agree") {
  PrecisionContext ctx(kBits);
  ScopedPrecision g(kBits);
  JFPParams params = JFPParams::checked(Param(1, 2), Param(0), Param(1, 2), Param(2));
  std::vector<double> cd{0.5, -0.25, 0.125, 0.0625, -0.03125};
  std::vector<Real> cr(cd.begin(), cd.end());
  for (double x : {-0.95, -0.1, 0.4, 1.0})
    CHECK(std::abs(jfp_sum(params, cd, x) - jfp_sum(params, cr, Real(x)).to_double()) <= 1e-14);
}

TEST_CASE("diagonal scaling entries") {
  PrecisionContext ctx(kBits);
  ScopedPrecision g(kBits);
  for (const Real& d : scaling_D(Param(3, 4), Param(1), 6, ctx)) CHECK(d == Real(1));
  auto d = scaling_D(Param(0), Param(2), 4, ctx);
  CHECK(d[0] == Real(1));
  CHECK(mp::abs(d[1] - mp::sqrt(Real(2))) <= 4 * eps_real(kBits));
  CHECK(mp::abs(d[2] - 2) <= 4 * eps_real(kBits));
  CHECK(mp::abs(d[3] - 2 * mp::sqrt(Real(2))) <= 8 * eps_real(kBits));
}

TEST_CASE("weighted monomials in y are scaled fractional monomials in x") {
  PrecisionContext ctx(kBits);
  ScopedPrecision g(kBits);
  Param b(1, 2), p(3);
  auto d = scaling_D(b, p, 6, ctx);
  Real x("0.5");
  Real y = map_to_y(x, p.to_real());
  Real delta = (b / p).to_real(), gamma = (Param(1) / p).to_real();
  for (long n = 0; n < 6; ++n) {
    Real lhs = mp::pow(y + 1, b.to_real() + n);
    Real rhs = mp::pow(x + 1, delta + gamma * n) * d[static_cast<std::size_t>(n)];
    CHECK(mp::abs(lhs - rhs) <= Real(1e-28));
  }
}

TEST_CASE("multiplication by x reduces to the Jacobi operator for p = 1") {
  PrecisionContext ctx(kBits);
  ScopedPrecision g(kBits);
  JFPParams params = JFPParams::checked(Param(1, 2), Param(3, 2), Param(0), Param(1));
  RealBanded x = mult_x_matrix(params, 12, ctx);
  RealBanded j = jacobi_operator(params.jacobi, 12, ctx);
  for (std::size_t c = 0; c < 12; ++c)
    for (std::size_t r = 0; r < 12; ++r) CHECK(mp::abs(x.get(r, c) - j.get(r, c)) <= 8 * eps_real(kBits));
}

TEST_CASE("multiplication by x has bandwidths (p, p) and acts pointwise") {
  PrecisionContext ctx(kBits);
  ScopedPrecision g(kBits);
  std::vector<JFPParams> cases{legendre_p(2), JFPParams::checked(Param(1, 2), Param(0), Param(-1, 2), Param(3)),
                               JFPParams::checked(Param(0), Param(1), Param(1), Param(4))};
  for (const auto& params : cases) {
    long p = params.p.to_integer();
    RealBanded x = mult_x_matrix(params, 16, ctx);
    CHECK(x.lower() == p);
    CHECK(x.upper() == p);
    CHECK(x.to_dense().bandwidths() == std::pair<long, long>{p, p});
    for (Real pt : {Real("0.25"), Real("-0.6"), Real("0.9")}) {
      auto q = basis_values(params, 16, pt, ctx);
      for (std::size_t j = 0; j < 8; ++j) CHECK(mp::abs(pt * q[j] - combine(q, x, j)) <= Real(1e-25));
    }
  }
}

TEST_CASE("multiplication by x needs an integer power") {
  PrecisionContext ctx(kBits);
  JFPParams params = JFPParams::checked(Param(0), Param(0), Param(0), Param(5, 2));
  CHECK_THROWS_AS(mult_x_matrix(params, 8, ctx), DomainError);
}

TEST_CASE("integration matrix first column for p = 1") {
  PrecisionContext ctx(kBits);
  ScopedPrecision g(kBits);
  RealBanded integ = int_matrix(legendre_p(1), 10, ctx);
  CHECK(mp::abs(integ.get(0, 0) - 1) <= 4 * eps_real(kBits));
  CHECK(mp::abs(integ.get(1, 0) - 1) <= 4 * eps_real(kBits));
  for (std::size_t i = 2; i < 10; ++i) CHECK(integ.get(i, 0).is_zero());
}

TEST_CASE("integration matrix admissibility") {
  PrecisionContext ctx(kBits);
  CHECK(int_matrix_admissible(legendre_p(2)));
  CHECK(int_matrix_admissible(JFPParams::checked(Param(-1, 2), Param(-1, 2), Param(-1, 2), Param(3))));
  CHECK_FALSE(int_matrix_admissible(JFPParams::checked(Param(0), Param(0), Param(1, 2), Param(2))));
  CHECK_FALSE(int_matrix_admissible(JFPParams::checked(Param(0), Param(0), Param(0), Param(3, 2))));
  CHECK_FALSE(int_matrix_admissible(JFPParams::checked(Param(0), Param(3), Param(0), Param(2))));
  JFPParams bad = JFPParams::checked(Param(0), Param(0), Param(1, 2), Param(2));
  try {
    int_matrix(bad, 8, ctx);
    FAIL("expected a DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("non-negative integers") != std::string::npos);
  }
}

TEST_CASE("integration matrix acts pointwise as the integral from -1") {
  PrecisionContext ctx(kBits);
  ScopedPrecision g(kBits);
  // Q_0 = (1+y)^b and Q_1 = (1+y)^b P_1(y) integrate in closed form through (1+x)^s
  auto int_power = [](const Real& s, const Real& p, const Real& x) {
    Real e = s / p;
    return mp::pow(Real(2), s * (1 - 1 / p)) * mp::pow(x + 1, e + 1) / (e + 1);
  };
  std::vector<JFPParams> cases{legendre_p(2), JFPParams::checked(Param(1, 2), Param(1, 2), Param(-1, 2), Param(3)),
                               JFPParams::checked(Param(0), Param(1), Param(1), Param(2))};
  for (const auto& params : cases) {
    long p = params.p.to_integer();
    RealBanded integ = int_matrix(params, 20, ctx);
    CHECK(integ.lower() == p);
    CHECK(integ.upper() == p);
    Real a = params.jacobi.alpha.to_real(), bt = params.jacobi.beta.to_real(), b = params.b.to_real();
    Real pr(p);
    for (Real x : {Real("-0.5"), Real("0.1"), Real("0.95")}) {
      auto q = basis_values(params, 20, x, ctx);
      Real i0 = int_power(b, pr, x);
      // P_1 = (a+b+2)/2 (1+y) - (b+1)
      Real i1 = (a + bt + 2) / 2 * int_power(b + 1, pr, x) - (bt + 1) * int_power(b, pr, x);
      CHECK(mp::abs(combine(q, integ, 0) - i0) <= Real(1e-25));
      CHECK(mp::abs(combine(q, integ, 1) - i1) <= Real(1e-25));
    }
  }
}

TEST_CASE("integration matrix matches the triangular fractional build with mu = 1") {
  PrecisionContext ctx(kBits);
  ScopedPrecision g(kBits);
  for (const auto& params : {legendre_p(1), legendre_p(2),
                             JFPParams::checked(Param(-1, 2), Param(-1, 2), Param(-1, 2), Param(3))}) {
    std::size_t n = 24, p = static_cast<std::size_t>(params.p.to_integer());
    RealBanded integ = int_matrix(params, n, ctx);
    FracIntMatrix a = algorithm1(params, Param(1), n, ctx);
    Real m(0);
    for (std::size_t j = 0; j + p < n; ++j)
      for (std::size_t i = 0; i < n; ++i) m = mp::max(m, mp::abs(integ.get(i, j) - a.entry(i, j)));
    CHECK(m <= Real(1e-25));
  }
}

TEST_CASE("multiplication and integration satisfy the Sylvester relation") {
  PrecisionContext ctx(kBits);
  ScopedPrecision g(kBits);
  for (const auto& params : {legendre_p(2), JFPParams::checked(Param(-1, 2), Param(-1, 2), Param(-1, 2), Param(3))}) {
    std::size_t n = 30, p = static_cast<std::size_t>(params.p.to_integer()), big = n + 4 * p;
    RealMatrix x = mult_x_matrix(params, big, ctx).to_dense();
    RealMatrix integ = int_matrix(params, big, ctx).to_dense();
    // x I[u] - I[x u] = I^2[u]
    RealMatrix lhs = integ * (x + integ);
    RealMatrix rhs = x * integ;
    CHECK(max_abs_diff(lhs, rhs, n, n) <= Real(1e-22));
  }
}

TEST_CASE("integration matrix squared matches the second-order triangular build") {
  PrecisionContext ctx(kBits);
  ScopedPrecision g(kBits);
  JFPParams params = legendre_p(2);
  std::size_t n = 30, big = n + 8;
  RealMatrix integ = int_matrix(params, big, ctx).to_dense();
  RealMatrix sq = integ * integ;
  CHECK(sq.block(n, n).bandwidths().first <= 4);
  FracIntMatrix two = algorithm1(params, Param(2), big, ctx);
  CHECK(max_abs_diff(sq, two.section(big, big), n, n) <= Real(1e-25));
}
