#include "jfp/param.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "jfp/errors.hpp"

namespace jfp {

namespace {

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool is_integer_literal(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

bool is_decimal_literal(const std::string& s) {
  bool digit = false, dot = false;
  size_t i = 0;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!digit) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return i == s.size();
}

}  // namespace

Param Param::parse(std::string_view text, bool allow_decimal) {
  std::string s = trim(text);
  if (s.empty()) throw ConfigError("empty parameter");
  bool negative = false;
  size_t pos = 0;
  if (s[0] == '-' || s[0] == '+') {
    negative = s[0] == '-';
    pos = 1;
  }
  Param out(1);
  char op = '*';
  while (true) {
    size_t next = s.find_first_of("*/", pos);
    std::string tok = trim(std::string_view(s).substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (tok.empty()) throw ConfigError("malformed parameter '" + s + "'");
    Param f;
    if (tok == "pi") {
      f = Param(1);
      f.pi_pow_ = 1;
    } else if (tok == "e") {
      f = Param(1);
      f.e_pow_ = 1;
    } else if (is_integer_literal(tok)) {
      try {
        f = Param(static_cast<std::int64_t>(std::stoll(tok)));
      } catch (const std::out_of_range&) {
        throw ConfigError("integer out of range in '" + s + "'");
      }
    } else if (is_decimal_literal(tok)) {
      if (!allow_decimal)
        throw ConfigError("decimal value '" + tok +
                          "' needs explicit irrational acknowledgment; write rationals as a/b");
      f = Param(1);
      f.dec_pow_ = 1;
      f.dec_ = tok;
    } else {
      throw ConfigError("malformed parameter '" + s + "'");
    }
    out = op == '*' ? out * f : out / f;
    if (next == std::string::npos) break;
    op = s[next];
    pos = next + 1;
  }
  return negative ? -out : out;
}

Rational Param::rational() const {
  if (!is_rational()) throw DomainError("parameter " + str() + " is not rational");
  return r_;
}

std::int64_t Param::to_integer() const {
  if (!is_integer()) throw DomainError("parameter " + str() + " is not an integer");
  return r_.numerator();
}

mp::Real Param::to_real() const {
  mp::Real v(static_cast<long>(r_.numerator()));
  v /= mp::Real(static_cast<long>(r_.denominator()));
  if (pi_pow_ != 0) v *= mp::pow(mp::pi(), static_cast<long>(pi_pow_));
  if (e_pow_ != 0) v *= mp::pow(mp::exp(mp::Real(1)), static_cast<long>(e_pow_));
  if (dec_pow_ != 0) v *= mp::pow(mp::Real(dec_), static_cast<long>(dec_pow_));
  return v;
}

double Param::to_double() const {
  mp::ScopedPrecision guard(128);
  return to_real().to_double();
}

std::string Param::str() const {
  std::string num = std::to_string(r_.numerator());
  std::string den = r_.denominator() == 1 ? "" : std::to_string(r_.denominator());
  auto append = [](std::string& s, const std::string& atom, int pw) {
    for (int i = 0; i < pw; ++i) s += (s.empty() ? "" : "*") + atom;
  };
  std::string up, down;
  append(up, "pi", pi_pow_);
  append(up, "e", e_pow_);
  append(up, dec_, dec_pow_);
  append(down, "pi", -pi_pow_);
  append(down, "e", -e_pow_);
  append(down, dec_, -dec_pow_);
  std::string out = num;
  if (!up.empty()) out = num == "1" ? up : (num == "-1" ? "-" + up : num + "*" + up);
  if (!den.empty()) out += "/" + den;
  if (!down.empty()) {
    size_t p = 0;
    while (p < down.size()) {
      size_t q = down.find('*', p);
      out += "/" + down.substr(p, q == std::string::npos ? std::string::npos : q - p);
      if (q == std::string::npos) break;
      p = q + 1;
    }
  }
  return out;
}

Param Param::operator-() const {
  Param o = *this;
  o.r_ = -o.r_;
  return o;
}

Param operator*(const Param& a, const Param& b) {
  Param o;
  o.r_ = a.r_ * b.r_;
  o.pi_pow_ = a.pi_pow_ + b.pi_pow_;
  o.e_pow_ = a.e_pow_ + b.e_pow_;
  if (a.dec_pow_ != 0 && b.dec_pow_ != 0 && a.dec_ != b.dec_)
    throw ConfigError("at most one decimal irrational per expression");
  o.dec_pow_ = a.dec_pow_ + b.dec_pow_;
  o.dec_ = a.dec_pow_ != 0 ? a.dec_ : b.dec_;
  if (o.dec_pow_ == 0) o.dec_.clear();
  if (o.r_.numerator() == 0) o = Param(0);
  return o;
}

Param operator/(const Param& a, const Param& b) {
  if (b.r_.numerator() == 0) throw DomainError("division by zero parameter");
  Param inv;
  inv.r_ = Rational(1) / b.r_;
  inv.pi_pow_ = -b.pi_pow_;
  inv.e_pow_ = -b.e_pow_;
  inv.dec_pow_ = -b.dec_pow_;
  inv.dec_ = b.dec_;
  return a * inv;
}

Param operator+(const Param& a, const Param& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (!a.same_factor(b))
    throw DomainError("cannot add " + a.str() + " and " + b.str() + " exactly");
  Param o = a;
  o.r_ = a.r_ + b.r_;
  if (o.r_.numerator() == 0) o = Param(0);
  return o;
}

bool operator==(const Param& a, const Param& b) {
  if (a.is_zero() || b.is_zero()) return a.r_ == b.r_;
  return a.same_factor(b) && a.r_ == b.r_;
}

bool operator<(const Param& a, const Param& b) {
  if (a.is_rational() && b.is_rational()) return a.r_ < b.r_;
  mp::ScopedPrecision guard(256);
  return a.to_real() < b.to_real();
}

std::int64_t floor(const Rational& r) {
  std::int64_t q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return q;
}

}  // namespace jfp
