#pragma once

// Classical Jacobi polynomial machinery: evaluation, Gram and connection
// matrices, and the banded conversion / weighted conversion / weighted
// differentiation operators.

#include <cstddef>
#include <vector>

#include "jfp/matrix.hpp"
#include "jfp/param.hpp"
#include "jfp/precision.hpp"

namespace jfp {

/// Jacobi weight exponents (1-x)^alpha (1+x)^beta.
struct JacobiParams {
  Param alpha{0};
  Param beta{0};

  /// Throws DomainError unless alpha, beta > -1.
  static JacobiParams checked(const Param& alpha, const Param& beta);
  JacobiParams shifted(const Param& da, const Param& db) const { return {alpha + da, beta + db}; }
};

/// Three-term recurrence P_{n+1} = (a_n x + b_n) P_n - c_n P_{n-1}.
struct RecurrenceCoeffs {
  Real a, b, c;
};
RecurrenceCoeffs recurrence(const Real& alpha, const Real& beta, long n);

/// P_n^{(alpha,beta)}(x).
Real jacobi_eval(const JacobiParams& jp, long n, const Real& x, const PrecisionContext& ctx);
/// P_0(x), ..., P_{n_max}(x) at the working precision.
std::vector<Real> jacobi_eval_all(const Real& alpha, const Real& beta, long n_max, const Real& x);
/// sum_n c_n P_n(x) by Clenshaw's algorithm at the working precision.
Real jacobi_clenshaw(const Real& alpha, const Real& beta, const std::vector<Real>& c, const Real& x);
double jacobi_clenshaw(double alpha, double beta, const std::vector<double>& c, double x);
/// d/dx sum_n c_n P_n(x).
Real jacobi_clenshaw_derivative(const Real& alpha, const Real& beta, const std::vector<Real>& c, const Real& x);

/// Upper triangular C with P_n(x) = sum_k C_{k,n} (1+x)^k.
RealMatrix connection_matrix(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx);
/// M_{ij} = int (1+x)^{i+j} w(x) dx.
RealMatrix gram_matrix(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx);
/// Squared norms ||P_n||^2.
std::vector<Real> jacobi_norms(const Real& alpha, const Real& beta, std::size_t n);  // working precision
std::vector<Real> jacobi_norms(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx);
/// C^{-1} = ||P||^{-2} C^T M restricted to its upper triangle.
RealMatrix connection_inverse(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx);

/// P^{(a,b)} = P^{(a+k,b+j)} R, bandwidths (0, k+j).
RealBanded conversion_R(const JacobiParams& jp, long k, long j, std::size_t n, const PrecisionContext& ctx);
/// (1-x)^k (1+x)^j P^{(a+k,b+j)} = P^{(a,b)} L, bandwidths (k+j, 0).
RealBanded weighted_conversion_L(const JacobiParams& jp, long k, long j, std::size_t n,
                                 const PrecisionContext& ctx);
/// D[(1+x)^{b+1} P^{(a,b+1)}] = (1+x)^b P^{(a+1,b)} W with W diagonal.
std::vector<Real> weighted_diff_W(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx);
/// Tridiagonal matrix of multiplication by (1+x).
RealBanded mult_1px(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx);

/// Tridiagonal Jacobi operator (multiplication by x), built directly from the
/// recurrence.
RealBanded jacobi_operator(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx);

/// 2-norm condition number of a dense section (double precision SVD).
double condition_number(const Dense<double>& a);

}  // namespace jfp
