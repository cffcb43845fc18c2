#include "jfp/precision.hpp"

#include <cmath>
#include <string>

#include "jfp/errors.hpp"

namespace jfp {

PrecisionContext::PrecisionContext(long bits) : q(bits) {
  if (bits < 24) throw DomainError("precision must be at least 24 bits, got " + std::to_string(bits));
}

double PrecisionContext::eps() const { return jfp::eps(q); }
Real PrecisionContext::eps_real() const { return jfp::eps_real(q); }

double eps(long q) {
  if (q < 1) throw DomainError("eps: q must be positive");
  return std::ldexp(1.0, static_cast<int>(1 - q));
}

Real eps_real(long q) {
  if (q < 1) throw DomainError("eps: q must be positive");
  mp::ScopedPrecision guard(std::max(q, 53L));
  return mp::ldexp(Real(1), 1 - q);
}

namespace {

void check_pole(const Real& x, const char* what) {
  if (x.is_integer() && x <= 0L) throw DomainError(std::string(what) + ": pole at " + x.to_string(17));
}

}  // namespace

Real gamma(const Real& x) {
  check_pole(x, "gamma");
  return mp::gamma_raw(x);
}

Real lgamma(const Real& x) {
  check_pole(x, "lgamma");
  Real r;
  int sign = 0;
  mpfr_lgamma(r.raw(), &sign, x.raw(), MPFR_RNDN);
  return r;
}

Real beta(const Real& a, const Real& b) {
  if (a <= 0L || b <= 0L) throw DomainError("beta: arguments must be positive");
  Real s = a + b;
  if (s > 30L) {
    mpfr_prec_t q = mp::working_precision();
    Real r;
    {
      mp::ScopedPrecision guard(q + 32 + static_cast<long>(std::log2(s.to_double())));
      r = mp::exp(mp::lngamma_raw(a) + mp::lngamma_raw(b) - mp::lngamma_raw(s));
    }
    r.round_to(q);
    return r;
  }
  return mp::gamma_raw(a) * mp::gamma_raw(b) / mp::gamma_raw(s);
}

Real erf(const Real& x) { return mp::erf_raw(x); }

Real erfc(const Real& x) {
  if (x.sign() < 0) return Real(2L) - mp::erfc_raw(mp::abs(x));
  return mp::erfc_raw(x);
}

Real gamma_ratio(const Real& a, const Real& mu) {
  Real b = a + mu;
  check_pole(b, "gamma_ratio");
  if (a > 30L && b > 30L) {
    mpfr_prec_t q = mp::working_precision();
    // lgamma(a) ~ a log a: carry enough guard bits to keep the difference exact to q bits
    long guard_bits = 16 + static_cast<long>(std::log2(std::max(1.0, a.to_double() * std::log(a.to_double()))));
    Real r;
    {
      mp::ScopedPrecision guard(q + guard_bits);
      r = mp::exp(mp::lngamma_raw(a) - mp::lngamma_raw(b));
    }
    r.round_to(q);
    return r;
  }
  check_pole(a, "gamma_ratio");
  return mp::gamma_raw(a) / mp::gamma_raw(b);
}

Real pochhammer(const Real& a, long n) {
  Real r(1L);
  for (long i = 0; i < n; ++i) r *= a + i;
  return r;
}

Real gamma(const Real& x, const PrecisionContext& ctx) {
  auto g = ctx.activate();
  return gamma(x);
}

Real beta(const Real& a, const Real& b, const PrecisionContext& ctx) {
  auto g = ctx.activate();
  return beta(a, b);
}

Real erfc(const Real& x, const PrecisionContext& ctx) {
  auto g = ctx.activate();
  return erfc(x);
}

Real gamma_ratio(const Real& a, const Real& mu, const PrecisionContext& ctx) {
  auto g = ctx.activate();
  return gamma_ratio(a, mu);
}

}  // namespace jfp
