#include "jfp/mittag_leffler.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "jfp/errors.hpp"

namespace jfp {

namespace {

long bits_for(double delta) { return static_cast<long>(std::ceil(-std::log2(delta))); }

/// Series at q bits; the result carries q bits.
Real series_at(const Real& a, const Real& b, const Real& z, long q) {
  mp::ScopedPrecision g(q);
  Real zz = z, aa = a, bb = b;
  zz.round_to(q);
  aa.round_to(q);
  bb.round_to(q);
  Real sum(0), zk(1), biggest(0);
  Real tiny = mp::ldexp(Real(1), -q);
  int small_run = 0;
  for (long k = 0;; ++k) {
    Real term = zk / gamma(aa * k + bb);
    sum += term;
    biggest = mp::max(biggest, mp::abs(sum));
    if (mp::abs(term) <= tiny * biggest) {
      if (++small_run >= 10) break;
    } else {
      small_run = 0;
    }
    if (zz.is_zero() && k > 0) break;
    zk *= zz;
    if (k > 50'000'000) throw ConvergenceError("Mittag-Leffler series did not terminate");
  }
  return sum;
}

/// 1 / Gamma(b - a k), exactly zero at the poles.
Real reciprocal_gamma_shift(const MLParams& p, long k) {
  Param arg = p.b - p.a * Param(k);
  if (arg.is_integer() && arg.to_integer() <= 0) return Real(0);
  return Real(1) / gamma(arg.to_real());
}

/// Algebraic expansion -sum_{k>=1} z^{-k} / Gamma(b - a k) for 0 < a < 1 and
/// z < 0, truncated at its smallest term; empty when that term is not small.
std::optional<Real> asymptotic(const MLParams& p, const Real& z, double delta) {
  long q = bits_for(delta) + 64;
  mp::ScopedPrecision g(q);
  Real zz = z;
  Real inv = Real(1) / zz, zk = inv, sum(0), prev(0);
  Real tol = Real(delta) / 8;
  for (long k = 1; k < 100000; ++k, zk *= inv) {
    Real term = zk * reciprocal_gamma_shift(p, k);
    if (term.is_zero()) continue;
    Real mag = mp::abs(term);
    if (!prev.is_zero() && mag > prev) return std::nullopt;
    prev = mag;
    sum -= term;
    if (mag <= tol * mp::max(Real(1), mp::abs(sum))) return sum;
  }
  return std::nullopt;
}

enum class ClosedForm { none, exp, cos, erfc };

ClosedForm closed_form(const MLParams& p) {
  if (!(p.b == Param(1))) return ClosedForm::none;
  if (p.a == Param(1)) return ClosedForm::exp;
  if (p.a == Param(2)) return ClosedForm::cos;
  if (p.a == Param(1, 2)) return ClosedForm::erfc;
  return ClosedForm::none;
}

Real closed_value(ClosedForm f, const Real& z) {
  switch (f) {
    case ClosedForm::exp:
      return mp::exp(z);
    case ClosedForm::cos:
      return z.sign() < 0 ? mp::cos(mp::sqrt(-z)) : mp::cosh(mp::sqrt(z));
    case ClosedForm::erfc:
      return mp::exp(z * z) * erfc(-z);
    case ClosedForm::none:
      break;
  }
  throw InternalError("no closed form");
}

}  // namespace

MLParams MLParams::checked(const Param& a, const Param& b) {
  if (!(Param(0) < a) || !(Param(0) < b))
    throw DomainError("Mittag-Leffler parameters must be positive, got (" + a.str() + ", " + b.str() + ")");
  return {a, b};
}

Real ml_series(const MLParams& params, const Real& z, double delta) {
  if (!(delta > 0 && delta < 1)) throw DomainError("accuracy must lie in (0, 1)");
  if (!z.is_finite()) throw DomainError("Mittag-Leffler argument must be finite");
  long out_bits = mp::working_precision();
  long base = bits_for(delta) + 32;
  long extra = 0;
  {
    mp::ScopedPrecision g(64);
    double az = std::abs(z.to_double());
    double inv_a = 1.0 / params.a.to_double();
    if (z.sign() < 0 && az > 0) extra = static_cast<long>(std::ceil(1.5 * std::pow(az, inv_a) * M_LOG2E)) + 16;
  }
  if (extra > kAsymptoticBits && z.sign() < 0 && params.a < Param(1)) {
    if (auto v = asymptotic(params, z, delta)) {
      mp::ScopedPrecision o(out_bits);
      Real r(0);
      r = *v;
      r.round_to(out_bits);
      return r;
    }
  }
  for (long q = base + extra; q <= kMaxMLPrecision; q *= 2) {
    long q2 = q + 32 + q / 4;
    Real a, b;
    {
      mp::ScopedPrecision g(q2);
      a = params.a.to_real();
      b = params.b.to_real();
    }
    Real v1 = series_at(a, b, z, q);
    Real v2 = series_at(a, b, z, q2);
    mp::ScopedPrecision g(q2);
    Real diff = mp::abs(v1 - v2);
    if (diff <= Real(delta) * mp::max(Real(1), mp::abs(v2)) / 4) {
      mp::ScopedPrecision o(out_bits);
      Real r(0);
      r = v2;
      r.round_to(out_bits);
      return r;
    }
  }
  throw ConvergenceError("Mittag-Leffler evaluation exceeded " + std::to_string(kMaxMLPrecision) + " bits at z = " +
                         z.to_string(8));
}

Real ml_eval(const MLParams& params, const Real& z, double delta) {
  ClosedForm f = closed_form(params);
  if (f == ClosedForm::none) return ml_series(params, z, delta);
  long out_bits = mp::working_precision();
  long q = std::max(out_bits, bits_for(delta)) + 64;
  mp::ScopedPrecision g(q);
  Real zz = z;
  Real v = closed_value(f, zz);
  v.round_to(out_bits);
  return v;
}

double ml_eval(const MLParams& params, double z, double delta) {
  mp::ScopedPrecision g(64);
  return ml_eval(params, Real(z), delta).to_double();
}

Real ml_solution(const Param& mu, const Param& nu, const Real& lambda, const Real& x, double delta) {
  MLParams p = MLParams::checked(mu, nu);
  long out_bits = mp::working_precision();
  mp::ScopedPrecision g(out_bits + 32);
  Real opx = x + 1;
  if (opx.sign() < 0) throw DomainError("Mittag-Leffler solution needs x >= -1");
  Real w = nu == Param(1) ? Real(1) : mp::pow(opx, nu.to_real() - 1);
  Real z = -lambda * mp::pow(opx, mu.to_real());
  Real v = w * ml_eval(p, z, delta);
  v.round_to(out_bits);
  return v;
}

double ml_solution(const Param& mu, const Param& nu, double lambda, double x, double delta) {
  mp::ScopedPrecision g(64);
  return ml_solution(mu, nu, Real(lambda), Real(x), delta).to_double();
}

std::vector<Real> ml_monomial_coeffs(const Param& mu, const Param& nu, const Real& lambda, std::size_t n) {
  Real m = mu.to_real(), v = nu.to_real();
  Real r = -mp::pow(Real(2), m) * lambda;
  std::vector<Real> out;
  out.reserve(n);
  Real rk(1);
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(rk / gamma(v + m * static_cast<long>(k)));
    rk *= r;
  }
  return out;
}

}  // namespace jfp
