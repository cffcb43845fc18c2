#pragma once

// Value-semantic wrapper around an MPFR float.
//
// Every Real carries its own mantissa precision. Freshly computed values
// (arithmetic results, special functions, conversions) take the thread's
// working precision, which is installed with ScopedPrecision.

#include <mpfr.h>

#include <cstring>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace jfp::mp {

namespace detail {
inline thread_local mpfr_prec_t working_prec = 53;
}

inline mpfr_prec_t working_precision() noexcept { return detail::working_prec; }

inline void set_working_precision(mpfr_prec_t bits) {
  if (bits < MPFR_PREC_MIN || bits > MPFR_PREC_MAX)
    throw std::invalid_argument("precision out of range: " + std::to_string(bits));
  detail::working_prec = bits;
}

/// Installs a working precision for the lifetime of the guard.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(long bits) : saved_(working_precision()) {
    set_working_precision(bits);
  }
  ~ScopedPrecision() { detail::working_prec = saved_; }
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  mpfr_prec_t saved_;
};

class Real {
 public:
  Real() {
    mpfr_init2(v_, working_precision());
    mpfr_set_zero(v_, 1);
  }
  Real(double d) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, working_precision());
    mpfr_set_d(v_, d, MPFR_RNDN);
  }
  Real(int i) : Real(static_cast<long>(i)) {}  // NOLINT
  Real(long i) {                               // NOLINT
    mpfr_init2(v_, working_precision());
    mpfr_set_si(v_, i, MPFR_RNDN);
  }
  Real(long long i) : Real(static_cast<long>(i)) {}  // NOLINT
  Real(unsigned long i) {                            // NOLINT
    mpfr_init2(v_, working_precision());
    mpfr_set_ui(v_, i, MPFR_RNDN);
  }
  /// Parses a decimal (or "inf"/"nan") string at the working precision.
  explicit Real(std::string_view text) : Real(text, working_precision()) {}
  Real(std::string_view text, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    std::string s(text);
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0 && !valid_number(s)) {
      mpfr_clear(v_);
      throw std::invalid_argument("not a number: '" + s + "'");
    }
  }

  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    std::memcpy(v_, o.v_, sizeof(__mpfr_struct));
    o.v_->_mpfr_d = nullptr;
  }
  Real& operator=(const Real& o) {
    if (this == &o) return *this;
    if (v_->_mpfr_d == nullptr)
      mpfr_init2(v_, mpfr_get_prec(o.v_));
    else if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_))
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    if (this != &o) {
      if (v_->_mpfr_d != nullptr) mpfr_clear(v_);
      std::memcpy(v_, o.v_, sizeof(__mpfr_struct));
      o.v_->_mpfr_d = nullptr;
    }
    return *this;
  }
  ~Real() {
    if (v_->_mpfr_d != nullptr) mpfr_clear(v_);
  }

  static Real with_precision(mpfr_prec_t bits) {
    ScopedPrecision guard(bits);
    return Real();
  }

  mpfr_ptr raw() noexcept { return v_; }
  mpfr_srcptr raw() const noexcept { return v_; }
  mpfr_prec_t precision() const noexcept { return mpfr_get_prec(v_); }

  /// Rounds the stored value to `bits` (round-to-nearest).
  void round_to(mpfr_prec_t bits) { mpfr_prec_round(v_, bits, MPFR_RNDN); }

  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  explicit operator double() const noexcept { return to_double(); }
  long to_long() const noexcept { return mpfr_get_si(v_, MPFR_RNDN); }

  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
  bool is_nan() const noexcept { return mpfr_nan_p(v_) != 0; }
  bool is_integer() const noexcept { return mpfr_integer_p(v_) != 0; }
  int sign() const noexcept { return mpfr_sgn(v_); }
  /// Binary exponent e with 0.5 <= |x| / 2^e < 1; meaningless for zero.
  long exponent() const noexcept { return mpfr_get_exp(v_); }

  /// Scientific notation with `digits` significant decimal digits. With
  /// digits == 0 enough digits are emitted to round-trip at this precision.
  std::string to_string(int digits = 0) const;

  Real operator-() const {
    Real r;
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }

  Real& operator+=(const Real& o) {
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator-=(const Real& o) {
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator*=(const Real& o) {
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator/=(const Real& o) {
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator*=(long o) {
    mpfr_mul_si(v_, v_, o, MPFR_RNDN);
    return *this;
  }
  Real& operator/=(long o) {
    mpfr_div_si(v_, v_, o, MPFR_RNDN);
    return *this;
  }

  /// this += a * b with a single rounding.
  void fma_add(const Real& a, const Real& b) { mpfr_fma(v_, a.v_, b.v_, v_, MPFR_RNDN); }
  /// this -= a * b with a single rounding.
  void fma_sub(const Real& a, const Real& b) {
    mpfr_fms(v_, a.v_, b.v_, v_, MPFR_RNDN);
    mpfr_neg(v_, v_, MPFR_RNDN);
  }

  friend Real operator+(const Real& a, const Real& b) {
    Real r;
    mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator-(const Real& a, const Real& b) {
    Real r;
    mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator*(const Real& a, const Real& b) {
    Real r;
    mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator/(const Real& a, const Real& b) {
    Real r;
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator*(const Real& a, long b) {
    Real r;
    mpfr_mul_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
  }
  friend Real operator*(long b, const Real& a) { return a * b; }
  friend Real operator*(const Real& a, int b) { return a * static_cast<long>(b); }
  friend Real operator*(int b, const Real& a) { return a * static_cast<long>(b); }
  friend Real operator/(const Real& a, long b) {
    Real r;
    mpfr_div_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
  }
  friend Real operator/(const Real& a, int b) { return a / static_cast<long>(b); }
  friend Real operator+(const Real& a, long b) {
    Real r;
    mpfr_add_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
  }
  friend Real operator+(long b, const Real& a) { return a + b; }
  friend Real operator+(const Real& a, int b) { return a + static_cast<long>(b); }
  friend Real operator+(int b, const Real& a) { return a + static_cast<long>(b); }
  friend Real operator-(const Real& a, long b) {
    Real r;
    mpfr_sub_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
  }
  friend Real operator-(long b, const Real& a) {
    Real r;
    mpfr_si_sub(r.v_, b, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator-(const Real& a, int b) { return a - static_cast<long>(b); }
  friend Real operator-(int b, const Real& a) { return static_cast<long>(b) - a; }
  friend Real operator/(long b, const Real& a) {
    Real r;
    mpfr_si_div(r.v_, b, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator/(int b, const Real& a) { return static_cast<long>(b) / a; }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }
  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const Real& a, const Real& b) {
    return mpfr_greaterequal_p(a.v_, b.v_) != 0;
  }
  friend bool operator==(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }
  friend bool operator<(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) < 0; }
  friend bool operator>(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) > 0; }
  friend bool operator<=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) <= 0; }
  friend bool operator>=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) >= 0; }

  friend std::ostream& operator<<(std::ostream& os, const Real& x) {
    return os << x.to_string(static_cast<int>(os.precision()));
  }

 private:
  static bool valid_number(const std::string& s) {
    return s == "nan" || s == "@NaN@";
  }

  mpfr_t v_;
};

// -- elementary functions (results at the working precision) --------------

#define JFP_MP_UNARY(name, fn)            \
  inline Real name(const Real& x) {       \
    Real r;                               \
    fn(r.raw(), x.raw(), MPFR_RNDN);      \
    return r;                             \
  }

JFP_MP_UNARY(abs, mpfr_abs)
JFP_MP_UNARY(sqrt, mpfr_sqrt)
JFP_MP_UNARY(exp, mpfr_exp)
JFP_MP_UNARY(log, mpfr_log)
JFP_MP_UNARY(log2, mpfr_log2)
JFP_MP_UNARY(log10, mpfr_log10)
JFP_MP_UNARY(sin, mpfr_sin)
JFP_MP_UNARY(cos, mpfr_cos)
JFP_MP_UNARY(tan, mpfr_tan)
JFP_MP_UNARY(atan, mpfr_atan)
JFP_MP_UNARY(sinh, mpfr_sinh)
JFP_MP_UNARY(cosh, mpfr_cosh)
JFP_MP_UNARY(tanh, mpfr_tanh)
JFP_MP_UNARY(erf_raw, mpfr_erf)
JFP_MP_UNARY(erfc_raw, mpfr_erfc)
JFP_MP_UNARY(gamma_raw, mpfr_gamma)
JFP_MP_UNARY(lngamma_raw, mpfr_lngamma)
JFP_MP_UNARY(cbrt, mpfr_cbrt)

#undef JFP_MP_UNARY

inline Real floor(const Real& x) {
  Real r;
  mpfr_floor(r.raw(), x.raw());
  return r;
}
inline Real ceil(const Real& x) {
  Real r;
  mpfr_ceil(r.raw(), x.raw());
  return r;
}
inline Real pow(const Real& x, const Real& y) {
  Real r;
  mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}
inline Real pow(const Real& x, long n) {
  Real r;
  mpfr_pow_si(r.raw(), x.raw(), n, MPFR_RNDN);
  return r;
}
inline Real pow(const Real& x, int n) { return pow(x, static_cast<long>(n)); }
/// x * 2^e, exact.
inline Real ldexp(const Real& x, long e) {
  Real r;
  mpfr_mul_2si(r.raw(), x.raw(), e, MPFR_RNDN);
  return r;
}
inline Real pi() {
  Real r;
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}
inline const Real& max(const Real& a, const Real& b) { return a < b ? b : a; }
inline const Real& min(const Real& a, const Real& b) { return b < a ? b : a; }

inline std::string Real::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (digits <= 0) digits = static_cast<int>(mpfr_get_str_ndigits(10, mpfr_get_prec(v_)));
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

}  // namespace jfp::mp
