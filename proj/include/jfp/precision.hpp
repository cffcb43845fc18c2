#pragma once

// Precision contract and the special functions used throughout the library.

#include "jfp/real.hpp"

namespace jfp {

using mp::Real;

/// Mantissa precision of a computation. eps = 2^(1-q).
struct PrecisionContext {
  long q = 53;

  explicit PrecisionContext(long bits = 53);

  double eps() const;
  Real eps_real() const;
  mp::ScopedPrecision activate() const { return mp::ScopedPrecision(q); }
};

/// 2^(1-q) in double (underflows to 0 for very large q).
double eps(long q);
/// 2^(1-q), exact, at max(q, 53) bits.
Real eps_real(long q);

// The following evaluate at the thread's working precision; the overloads
// taking a context evaluate at ctx.q.

Real gamma(const Real& x);
Real lgamma(const Real& x);  // log|Gamma(x)|
Real beta(const Real& a, const Real& b);
Real erf(const Real& x);
Real erfc(const Real& x);
/// Gamma(a) / Gamma(a + mu).
Real gamma_ratio(const Real& a, const Real& mu);
/// Rising factorial (a)_n.
Real pochhammer(const Real& a, long n);

Real gamma(const Real& x, const PrecisionContext& ctx);
Real beta(const Real& a, const Real& b, const PrecisionContext& ctx);
Real erfc(const Real& x, const PrecisionContext& ctx);
Real gamma_ratio(const Real& a, const Real& mu, const PrecisionContext& ctx);

}  // namespace jfp
