#include "jfp/sumspace_bench.hpp"

#include <fmt/format.h>

#include <cmath>
#include <functional>
#include <limits>

#include "jfp/errors.hpp"
#include "jfp/fie_solver.hpp"
#include "jfp/frac_ops.hpp"
#include "jfp/jacobi.hpp"
#include "jfp/mittag_leffler.hpp"

namespace jfp {

std::vector<Real> SumSpaceCoeffs::legendre() const {
  std::vector<Real> a;
  for (std::size_t i = 0; i < c.size(); i += 2) a.push_back(c[i]);
  return a;
}

std::vector<Real> SumSpaceCoeffs::weighted() const {
  std::vector<Real> b;
  for (std::size_t i = 1; i < c.size(); i += 2) b.push_back(c[i]);
  return b;
}

double SumSpaceCoeffs::log10_max() const {
  if (c.empty()) return -std::numeric_limits<double>::infinity();
  mp::ScopedPrecision g(c.front().precision());
  Real m(0);
  for (const Real& v : c) m = mp::max(m, mp::abs(v));
  if (m.is_zero()) return -std::numeric_limits<double>::infinity();
  return mp::log10(m).to_double();
}

namespace {

void check_even(std::size_t N) {
  if (N == 0 || N % 2 != 0) throw DomainError("sum-space truncation must be positive and even, got " + std::to_string(N));
}

/// Tridiagonal A = 1 + s T as (sub, diag, sup) with sub[i] = A(i, i-1), sup[i] = A(i, i+1).
struct Tridiagonal {
  std::vector<Real> sub, diag, sup;

  Tridiagonal transposed() const {
    Tridiagonal t;
    std::size_t n = diag.size();
    t.diag = diag;
    t.sub.assign(n, Real(0));
    t.sup.assign(n, Real(0));
    for (std::size_t i = 1; i < n; ++i) {
      t.sub[i] = sup[i - 1];
      t.sup[i - 1] = sub[i];
    }
    return t;
  }

  std::vector<Real> apply(const std::vector<Real>& x) const {
    std::size_t n = diag.size();
    std::vector<Real> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = diag[i] * x[i];
      if (i > 0) y[i].fma_add(sub[i], x[i - 1]);
      if (i + 1 < n) y[i].fma_add(sup[i], x[i + 1]);
    }
    return y;
  }

  /// Gaussian elimination with partial pivoting (second superdiagonal fill-in).
  std::vector<Real> solve(std::vector<Real> rhs) const {
    std::size_t n = diag.size();
    std::vector<Real> d = diag, du(n, Real(0)), du2(n, Real(0)), dl(n, Real(0));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      du[i] = sup[i];
      dl[i] = sub[i + 1];
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (mp::abs(dl[i]) > mp::abs(d[i])) {
        std::swap(d[i], dl[i]);
        std::swap(du[i], d[i + 1]);
        if (i + 2 < n) std::swap(du2[i], du[i + 1]);
        std::swap(rhs[i], rhs[i + 1]);
      }
      if (d[i].is_zero()) throw ConvergenceError("singular tridiagonal system");
      Real m = dl[i] / d[i];
      d[i + 1] -= m * du[i];
      if (i + 2 < n) du[i + 1] -= m * du2[i];
      rhs[i + 1] -= m * rhs[i];
    }
    if (d[n - 1].is_zero()) throw ConvergenceError("singular tridiagonal system");
    for (std::size_t i = n; i-- > 0;) {
      if (i + 1 < n) rhs[i] -= du[i] * rhs[i + 1];
      if (i + 2 < n) rhs[i] -= du2[i] * rhs[i + 2];
      rhs[i] /= d[i];
    }
    return rhs;
  }
};

Tridiagonal system(const Real& lambda, std::size_t N, const PrecisionContext& ctx) {
  RealBanded t = halfint_tridiagonal(N, ctx);
  auto g = ctx.activate();
  Real s = lambda * lambda;
  Tridiagonal a;
  a.diag.assign(N, Real(1));
  a.sub.assign(N, Real(0));
  a.sup.assign(N, Real(0));
  for (std::size_t i = 0; i < N; ++i) {
    if (i > 0) a.sub[i] = s * t.get(i, i - 1);
    if (i + 1 < N) a.sup[i] = s * t.get(i, i + 1);
  }
  return a;
}

Real norm2(const std::vector<Real>& v) {
  Real s(0);
  for (const Real& x : v) s.fma_add(x, x);
  return mp::sqrt(s);
}

/// Largest eigenvalue of the symmetric positive operator op by power iteration.
Real power_iteration(const std::function<std::vector<Real>(const std::vector<Real>&)>& op, std::size_t n,
                     int iterations) {
  std::vector<Real> x(n, Real(1));
  Real nx = norm2(x);
  for (Real& v : x) v /= nx;
  Real est(0);
  for (int it = 0; it < iterations; ++it) {
    std::vector<Real> y = op(x);
    Real ny = norm2(y);
    if (ny.is_zero()) return Real(0);
    Real prev = est;
    est = ny;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
    if (it > 10 && mp::abs(est - prev) <= est * Real(1e-12)) break;
  }
  return est;
}

}  // namespace

RealBanded halfint_tridiagonal(std::size_t N, const PrecisionContext& ctx) {
  check_even(N);
  auto g = ctx.activate();
  RealBanded t(N, N, 1, 1);
  for (std::size_t n = 0; 2 * n < N; ++n) {
    long nl = static_cast<long>(n);
    // I^{1/2} P_n = g1 sqrt(1+x) [(n+1) P_n^{(1/2,1/2)} - (n+1/2) P_{n-1}^{(1/2,1/2)}] / (2n+1)
    Real g1 = gamma_ratio(Real(nl + 1), Real(1) / 2);
    std::size_t a = 2 * n, b = 2 * n + 1;
    t.at(b, a) = g1 * Real(nl + 1) / Real(2 * nl + 1);
    if (n > 0) t.at(a - 1, a) = -g1 / 2;
    // I^{1/2} sqrt(1+x) P_n^{(1/2,1/2)} = g2 (P_n + P_{n+1})
    Real g2 = gamma_ratio(Real(nl) + Real(3) / 2, Real(1) / 2);
    t.at(a, b) = g2;
    if (b + 1 < N) t.at(b + 1, b) = g2;
  }
  return t;
}

HalfIntegration build_halfint(std::size_t N, const PrecisionContext& ctx) {
  check_even(N);
  std::size_t m = N / 2 + 1;
  PrecisionContext hi(ctx.q + 3 * static_cast<long>(N) + 64);
  JacobiParams legendre{Param(0), Param(0)};
  JacobiParams cheb{Param(1, 2), Param(1, 2)};
  RealMatrix c0 = connection_matrix(legendre, m, hi);
  RealMatrix ch = connection_matrix(cheb, m, hi);
  RealMatrix c0_inv = connection_inverse(legendre, m, hi);
  RealMatrix ch_inv = connection_inverse(cheb, m, hi);
  // (1+x)^{j/2} -> Lambda_j (1+x)^{(j+1)/2}
  LambdaMatrix lam = lambda_matrix(Param(0), Param(1, 2), 1, 2 * m, hi);
  auto g = hi.activate();
  std::size_t rows = 2 * m;
  RealMatrix full(rows, N);
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t n = col / 2;
    bool weighted = col % 2 == 1;
    const RealMatrix& conn = weighted ? ch : c0;
    const RealMatrix& inv = weighted ? c0_inv : ch_inv;
    // integrated half-monomial coefficients live at odd (even) powers for Legendre (weighted) columns
    std::vector<Real> mono(m, Real(0));
    for (std::size_t k = 0; k <= n; ++k) {
      std::size_t j = 2 * k + (weighted ? 1 : 0);
      Real v = conn(k, n) * lam.entries[j];
      if (weighted)
        mono[k + 1] = v;  // (1+x)^{k+1}
      else
        mono[k] = v;  // sqrt(1+x) (1+x)^k
    }
    for (std::size_t i = 0; i < m; ++i) {
      Real s(0);
      for (std::size_t k = i; k < m; ++k) s.fma_add(inv(i, k), mono[k]);
      full(2 * i + (weighted ? 0 : 1), col) = s;
    }
  }
  HalfIntegration out;
  out.residue = Real(0);
  out.matrix = RealBanded(N, N, 1, 1);
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t i = 0; i < rows; ++i) {
      long d = static_cast<long>(i) - static_cast<long>(j);
      if (d < -1 || d > 1)
        out.residue = mp::max(out.residue, mp::abs(full(i, j)));
      else if (i < N)
        out.matrix.at(i, j) = full(i, j);
    }
  auto g2 = ctx.activate();
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t i = out.matrix.col_begin(j); i < out.matrix.col_end(j); ++i) out.matrix.at(i, j).round_to(ctx.q);
  out.residue.round_to(ctx.q);
  if (out.residue > Real(1e-25))
    throw InternalError("half-integration operator is not tridiagonal: residue " + out.residue.to_string(6));
  return out;
}

SumSpaceCoeffs sumspace_solve(const Real& lambda, std::size_t N, const PrecisionContext& ctx) {
  if (lambda.sign() < 0) throw DomainError("sum-space solve needs lambda >= 0");
  Tridiagonal a = system(lambda, N, ctx);
  auto g = ctx.activate();
  std::vector<Real> rhs(N, Real(0));
  rhs[0] = Real(1);
  SumSpaceCoeffs out;
  out.c = a.solve(std::move(rhs));
  out.N = N;
  return out;
}

Real sumspace_eval(const SumSpaceCoeffs& s, const Real& x) {
  mp::ScopedPrecision g(s.c.empty() ? 53 : s.c.front().precision());
  Real u = jacobi_clenshaw(Real(0), Real(0), s.legendre(), x);
  Real opx = x + 1;
  if (opx.sign() <= 0) return u;
  return u + mp::sqrt(opx) * jacobi_clenshaw(Real(1) / 2, Real(1) / 2, s.weighted(), x);
}

long sumspace_reference_bits(double lambda) {
  return static_cast<long>(std::ceil(2 * std::pow(lambda, 4) * std::log2(std::exp(1.0)))) + 64;
}

std::size_t sumspace_auto_n(double lambda, double tol) {
  double z = 2 * std::pow(lambda, 4);
  double lt = std::log(tol);
  std::size_t n = 0;
  if (z > 0) {
    double lz = std::log(z), l2 = 2 * std::log(lambda);
    // (z^n / n!) and lambda^2 z^n / Gamma(n + 3/2) both below tol past the peak
    while (static_cast<double>(n) < z ||
           std::max(n * lz - std::lgamma(n + 1.0), l2 + n * lz - std::lgamma(n + 1.5)) > lt)
      ++n;
  }
  return std::max<std::size_t>(16, 2 * (n + 2));
}

double sumspace_log10_condition(const Real& lambda, std::size_t N, const PrecisionContext& ctx, int iterations) {
  Tridiagonal a = system(lambda, N, ctx);
  Tridiagonal at = a.transposed();
  auto g = ctx.activate();
  Real big = power_iteration([&](const std::vector<Real>& x) { return at.apply(a.apply(x)); }, N, iterations);
  Real inv = power_iteration([&](const std::vector<Real>& x) { return a.solve(at.solve(x)); }, N, iterations);
  return 0.5 * (mp::log10(big) + mp::log10(inv)).to_double();
}

std::size_t truncation_size(const std::vector<double>& c, double tol) {
  for (std::size_t i = c.size(); i-- > 0;)
    if (std::abs(c[i]) >= tol) return i + 1;
  return 0;
}

std::vector<ComparisonRow> compare_report(const std::vector<double>& lambdas, const CompareOptions& options) {
  std::vector<ComparisonRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double lambda : lambdas) {
    if (!(lambda >= 0)) throw DomainError("lambda must be non-negative");
    ComparisonRow row;
    row.lambda = lambda;
    row.sumspace_n = options.sumspace_n ? options.sumspace_n : sumspace_auto_n(lambda);
    row.sumspace_bits = sumspace_reference_bits(lambda);
    std::vector<double> x = grid(0.01);

    PrecisionContext dbl(53);
    SumSpaceCoeffs low = sumspace_solve(Real(lambda), row.sumspace_n, dbl);
    row.sumspace_double_error = 0;
    for (double xi : x) {
      double exact = ml_solution(Param(1, 2), Param(1), lambda * lambda, xi);
      double err = std::abs(sumspace_eval(low, Real(xi)).to_double() - exact);
      row.sumspace_double_error = std::isfinite(err) ? std::max(row.sumspace_double_error, err) : err;
      if (!std::isfinite(err)) break;
    }

    if (row.sumspace_bits <= options.max_bits) {
      PrecisionContext hi(row.sumspace_bits);
      SumSpaceCoeffs ref = sumspace_solve(Real(lambda), row.sumspace_n, hi);
      row.sumspace_log10_max_coeff = ref.log10_max();
      auto g = hi.activate();
      Real tol(options.target);
      row.sumspace_truncation = 0;
      for (std::size_t i = ref.c.size(); i-- > 0;)
        if (mp::abs(ref.c[i]) >= tol) {
          row.sumspace_truncation = i + 1;
          break;
        }
      row.sumspace_log10_condition =
          options.conditions ? sumspace_log10_condition(Real(lambda), row.sumspace_n, hi) : nan;
    } else {
      row.sumspace_log10_max_coeff = nan;
      row.sumspace_log10_condition = nan;
    }

    FIEProblem problem = mittag_leffler_problem(Param(1, 2), fmt::format("{}", lambda * lambda));
    BasisSelection basis = select_basis(problem);
    SolveOptions so;
    so.delta = options.delta;
    SolutionFunction sol = options.jfp_n ? solve(problem, basis, options.jfp_n, so) : solve_auto(problem, basis, so);
    row.jfp_n = sol.N;
    row.jfp_max_coeff = 0;
    for (double c : sol.coeffs) row.jfp_max_coeff = std::max(row.jfp_max_coeff, std::abs(c));
    row.jfp_error = max_error(sol, problem);
    row.jfp_truncation = truncation_size(sol.coeffs, options.target);
    row.jfp_condition = options.conditions ? condition_estimate(assemble(problem, basis, sol.N, so)) : nan;
    rows.push_back(row);
  }
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out =
      "# jfp sumspace comparison v1\n"
      "lambda,sumspace_n,sumspace_bits,sumspace_log10_max_coeff,sumspace_double_error,sumspace_log10_condition,"
      "sumspace_truncation,jfp_n,jfp_max_coeff,jfp_error,jfp_condition,jfp_truncation\n";
  for (const ComparisonRow& r : rows)
    out += fmt::format("{:.17g},{},{},{:.6f},{:.6e},{:.6f},{},{},{:.17g},{:.6e},{:.6f},{}\n", r.lambda, r.sumspace_n,
                       r.sumspace_bits, r.sumspace_log10_max_coeff, r.sumspace_double_error,
                       r.sumspace_log10_condition, r.sumspace_truncation, r.jfp_n, r.jfp_max_coeff, r.jfp_error,
                       r.jfp_condition, r.jfp_truncation);
  return out;
}

}  // namespace jfp
