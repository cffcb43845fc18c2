#pragma once

// Jacobi fractional polynomial basis Q_n(x) = (1+y)^b P_n^{(alpha,beta)}(y),
// (1+x)/2 = ((1+y)/2)^p.

#include <cstddef>
#include <vector>

#include "jfp/jacobi.hpp"

namespace jfp {

struct JFPParams {
  JacobiParams jacobi;
  Param b{0};
  Param p{1};

  /// Throws DomainError unless alpha, beta > -1 and p > 0.
  static JFPParams checked(const Param& alpha, const Param& beta, const Param& b, const Param& p);
  bool integer_p() const { return p.is_integer(); }
  std::string str() const;
};

/// y = 2((1+x)/2)^(1/p) - 1 at the working precision.
Real map_to_y(const Real& x, const Real& p);
/// x = 2((1+y)/2)^p - 1 at the working precision.
Real map_to_x(const Real& y, const Real& p);

/// Q_n(x); throws DomainError at x = -1 when b < 0.
Real jfp_eval(const JFPParams& params, long n, const Real& x, const PrecisionContext& ctx);
/// sum_n c_n Q_n(x) at the working precision.
Real jfp_sum(const JFPParams& params, const std::vector<Real>& coeffs, const Real& x);
double jfp_sum(const JFPParams& params, const std::vector<double>& coeffs, double x);
/// The double sum evaluated from 1 + x, accurate for x close to -1.
double jfp_sum_offset(const JFPParams& params, const std::vector<double>& coeffs, double opx);

/// Diagonal d_n = 2^((b+n)(1-1/p)).
std::vector<Real> scaling_D(const Param& b, const Param& p, std::size_t n, const PrecisionContext& ctx);

/// Multiplication by x in the JFP basis, bandwidths (p, p). Requires integer p.
RealBanded mult_x_matrix(const JFPParams& params, std::size_t n, const PrecisionContext& ctx);

/// First-order integration from -1 in the JFP basis, bandwidths (p, p).
/// Requires {p, beta - b, b + p - 1 - beta} to be non-negative integers.
RealBanded int_matrix(const JFPParams& params, std::size_t n, const PrecisionContext& ctx);

/// Whether int_matrix (and hence the Sylvester recurrence) is available.
bool int_matrix_admissible(const JFPParams& params);

}  // namespace jfp
