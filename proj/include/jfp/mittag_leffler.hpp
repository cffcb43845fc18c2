#pragma once

// Two-parameter Mittag-Leffler function E_{a,b}(z) on the real line and the
// closed-form solutions of u + lambda I^mu u = (1+x)^(nu-1).

#include <vector>

#include "jfp/param.hpp"
#include "jfp/precision.hpp"

namespace jfp {

struct MLParams {
  Param a{1};
  Param b{1};
  /// Throws DomainError unless a, b > 0.
  static MLParams checked(const Param& a, const Param& b);
};

/// Largest precision the evaluator escalates to before giving up.
inline constexpr long kMaxMLPrecision = 1L << 17;

/// E_{a,b}(z) to absolute-or-relative accuracy delta, rounded to the working
/// precision. Closed forms are used for (1,1), (2,1) and (1/2,1).
Real ml_eval(const MLParams& params, const Real& z, double delta);
double ml_eval(const MLParams& params, double z, double delta = 1e-15);

/// Series cancellation (in bits) above which the algebraic expansion is tried
/// for 0 < a < 1 and z < 0.
inline constexpr long kAsymptoticBits = 2048;

/// Power series with precision escalation until two precisions agree to
/// delta; large negative arguments with 0 < a < 1 use the algebraic expansion.
Real ml_series(const MLParams& params, const Real& z, double delta);

/// u(x) = (1+x)^(nu-1) E_{mu,nu}(-lambda (1+x)^mu).
Real ml_solution(const Param& mu, const Param& nu, const Real& lambda, const Real& x, double delta);
double ml_solution(const Param& mu, const Param& nu, double lambda, double x, double delta = 1e-15);

/// Coefficients (-2^mu lambda)^k / Gamma(nu + k mu) of u in the basis (1+x)^(nu-1) ((1+x)/2)^(k mu).
std::vector<Real> ml_monomial_coeffs(const Param& mu, const Param& nu, const Real& lambda, std::size_t n);

}  // namespace jfp
