#pragma once

// Spectral solution of linear fractional integral equations in the JFP basis.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "jfp/frac_ops.hpp"
#include "jfp/problem.hpp"

namespace jfp {

struct BasisSelection {
  JFPParams params;
  long k_star = 1;
  /// Singularity offset: (b + n) / p = nu - 1.
  long n = 0;
  /// Largest order of which every integral order is an integer multiple.
  Param base_order{1};
  /// All b > -p compatible with the solution weight, in decreasing order.
  std::vector<Param> permissible_b;
  /// Whether the integration matrix, and hence the column recurrence, exists.
  bool recurrence_available = false;
};

/// Chooses (alpha, beta, b, p). Explicit overrides win over those stored in
/// the problem; defaults are k_star = 1 and alpha = beta = 0.
BasisSelection select_basis(const FIEProblem& problem, const BasisOverrides& overrides = {});

struct SolveOptions {
  /// Accuracy of the fractional integration matrices.
  double delta = 1e-16;
  /// Precision of expansions and operator products.
  long build_bits = 128;
  /// Relative tail tolerance for function expansions.
  double expansion_tol = 1e-17;
  /// Relative truncation tolerance for variable coefficients.
  double coefficient_tol = 1.11e-16;
  /// Relative tail tolerance of the solution coefficients for convergence.
  double tail_tol = 1e-14;
  /// Automatic truncation: start size and cap.
  std::size_t n_start = 16;
  std::size_t n_max = 512;
};

/// Jacobi coefficients of f on [-1, 1], computed with Gauss-Jacobi quadrature
/// at 2x oversampling and doubled until the trailing coefficients fall below
/// tol * max|c|; trailing negligible coefficients are dropped.
std::vector<Real> jacobi_expand(const std::function<Real(const Real&)>& f, const Param& alpha, const Param& beta,
                                double tol, const PrecisionContext& ctx, std::size_t max_degree = 1024);

/// Coefficients in the JFP basis of sum_i (1+x)^{w_i} g_i(x), first n entries.
/// Each (1+x)^{w_i} (1+y)^{-b} must be a non-negative integer power of (1+y).
std::vector<Real> expand_parts(const std::vector<WeightedPart>& parts, const Environment& env,
                               const BasisSelection& basis, std::size_t n, const PrecisionContext& ctx,
                               double tol = 1e-17);
/// Right-hand side coefficients (closed form parts and samples).
std::vector<Real> expand_rhs(const FIEProblem& problem, const BasisSelection& basis, std::size_t n,
                             const PrecisionContext& ctx, double tol = 1e-17);

/// Multiplication by sum_k c_k P_k^{(alpha,beta)}(y) on the Jacobi basis,
/// n x n with bandwidths (m, m), m = c.size() - 1.
RealBanded mult_matrix_poly(const std::vector<Real>& c, const JacobiParams& jp, std::size_t n,
                            const PrecisionContext& ctx);
/// Multiplication by f(x) in the JFP basis: M with f Q = Q M, from the
/// expansion of f(x(y)) truncated at tol * max|c|. Throws ConvergenceError
/// when the degree would exceed max_degree.
RealBanded mult_matrix_fn(const std::function<Real(const Real&)>& f, const BasisSelection& basis, std::size_t n,
                          double tol, const PrecisionContext& ctx, std::size_t max_degree = 1024);

struct AssembledOperator {
  /// Leading n x n section of sum_k M_{a_k} I_{mu_k} M_{b_k}.
  RealMatrix section;
  long lower_bandwidth = 0;
  /// Negative when the upper bandwidth is unbounded.
  long upper_bandwidth = 0;
  std::size_t build_size = 0;
  double frac_error = 0;
  long frac_precision = 0;
  /// Degrees of the variable coefficient expansions, in term order.
  std::vector<long> coefficient_degrees;
};

AssembledOperator assemble(const FIEProblem& problem, const BasisSelection& basis, std::size_t n,
                           const SolveOptions& opts = {});

struct SolutionFunction {
  JFPParams basis;
  std::vector<double> coeffs;
  std::size_t N = 0;
  double residual = 0;
  /// Largest coefficient magnitude over the last 10% of entries.
  double tail = 0;
  double residual_estimate = 0;
  bool converged = false;
  double frac_error = 0;
  long frac_precision = 0;

  // Bordered problems: u = I^order v + sum_i c_i phi_i(x) + extra(x).
  std::vector<std::string> constant_names;
  std::vector<double> constants;
  std::vector<double> reconstructed_coeffs;
  /// The reconstructed integral part vanishes at x = -1 (order > 0).
  bool vanishes_at_left = false;
  std::vector<Expression> constant_shapes;
  Expression extra = Expression::parse("0");
  Environment env;
};

/// Truncated N x N solve in double precision.
SolutionFunction solve(const FIEProblem& problem, const BasisSelection& basis, std::size_t n,
                       const SolveOptions& opts = {});
/// Doubles N from opts.n_start until the coefficient tail converges; throws
/// ConvergenceError past opts.n_max.
SolutionFunction solve_auto(const FIEProblem& problem, const BasisSelection& basis, const SolveOptions& opts = {});
/// Bordered system: one row per point condition, then the operator rows;
/// unknowns are the constants followed by the N coefficients.
SolutionFunction solve_bordered(const FIEProblem& problem, const BasisSelection& basis, std::size_t n,
                                const SolveOptions& opts = {});

/// sum_n c_n Q_n(x).
double evaluate(const SolutionFunction& sol, double x);
/// The solution of the original equation (reconstructed for bordered problems).
double solution_value(const SolutionFunction& sol, double x);
/// solution_value at x = opx - 1 without cancellation in 1 + x.
double solution_value_offset(const SolutionFunction& sol, double opx);

/// 2-norm condition number of the N x N section.
double condition_estimate(const Dense<double>& section);
double condition_estimate(const AssembledOperator& op);

/// Closed-form solution when the problem carries one.
std::optional<double> exact_value(const FIEProblem& problem, double x);
/// Points -1, -1 + h, ..., 1 (the endpoint -1 is dropped when b < 0).
std::vector<double> grid(double h, bool include_left = true);
/// max |solution_value - exact| on grid(h); throws ConfigError without an exact solution.
double max_error(const SolutionFunction& sol, const FIEProblem& problem, double h = 0.01);
/// max |solution_value(a) - solution_value(b)| on grid(h).
double max_difference(const SolutionFunction& a, const SolutionFunction& b, double h = 0.01);

}  // namespace jfp
