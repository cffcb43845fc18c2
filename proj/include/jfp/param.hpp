#pragma once

// Exact scalar parameters.
//
// A Param is  r * pi^i * e^j * d^k  where r is an exact rational and d is an
// optional decimal literal treated as an opaque irrational. Products and
// quotients stay exact, so conditions such as "mu * p is a positive integer"
// are decided without rounding.

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "jfp/real.hpp"

namespace jfp {

using Rational = boost::rational<std::int64_t>;

class Param {
 public:
  Param() = default;
  Param(std::int64_t n) : r_(n) {}  // NOLINT(google-explicit-constructor)
  Param(std::int64_t num, std::int64_t den) : r_(num, den) {}
  Param(Rational r) : r_(r) {}  // NOLINT(google-explicit-constructor)

  /// Parses products/quotients of integers, "pi", "e" and (only when
  /// allow_decimal is set) decimal literals, e.g. "1/2", "1/pi", "2*pi/3".
  static Param parse(std::string_view text, bool allow_decimal = false);

  bool is_rational() const { return pi_pow_ == 0 && e_pow_ == 0 && dec_pow_ == 0; }
  bool is_integer() const { return is_rational() && r_.denominator() == 1; }
  bool is_zero() const { return r_.numerator() == 0; }
  /// Exact rational value; throws if the parameter is irrational.
  Rational rational() const;
  std::int64_t to_integer() const;

  mp::Real to_real() const;  // at the working precision
  double to_double() const;

  int sign() const { return r_.numerator() > 0 ? 1 : (r_.numerator() < 0 ? -1 : 0); }

  /// Canonical text form; parse(str()) reproduces the value.
  std::string str() const;

  Param operator-() const;
  friend Param operator*(const Param& a, const Param& b);
  friend Param operator/(const Param& a, const Param& b);
  /// Addition is only exact when both operands share the same irrational
  /// factor; otherwise it throws.
  friend Param operator+(const Param& a, const Param& b);
  friend Param operator-(const Param& a, const Param& b) { return a + (-b); }
  friend bool operator==(const Param& a, const Param& b);
  friend bool operator!=(const Param& a, const Param& b) { return !(a == b); }

  /// Ordering by numerical value (exact for rationals).
  friend bool operator<(const Param& a, const Param& b);

 private:
  bool same_factor(const Param& o) const {
    return pi_pow_ == o.pi_pow_ && e_pow_ == o.e_pow_ && dec_pow_ == o.dec_pow_ &&
           (dec_pow_ == 0 || dec_ == o.dec_);
  }

  Rational r_{0};
  int pi_pow_ = 0;
  int e_pow_ = 0;
  int dec_pow_ = 0;
  std::string dec_;
};

/// Exact rational floor / fractional split for rationals.
std::int64_t floor(const Rational& r);

}  // namespace jfp
