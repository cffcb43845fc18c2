#pragma once

// Closed-form coefficient and right-hand-side expressions.
//
// Grammar: numbers, identifiers, + - * / ^ (right associative), parentheses
// and the functions exp, log, sqrt, abs, sin, cos, erf, erfc, gamma.
// Identifiers pi and e are constants unless bound in the environment.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "jfp/precision.hpp"

namespace jfp {

using Environment = std::map<std::string, Real, std::less<>>;

class Expression {
 public:
  /// The constant 1.
  Expression();
  /// Throws ConfigError on malformed text.
  static Expression parse(std::string_view text);
  static Expression constant(const std::string& text) { return parse(text); }

  /// Evaluates at the working precision with `x` bound to the given value.
  Real eval(const Real& x, const Environment& env = {}) const;
  /// Evaluates without binding x; throws ConfigError if x is referenced.
  Real eval(const Environment& env = {}) const;
  double eval_double(double x, const Environment& env = {}) const;

  bool depends_on(std::string_view name) const;
  /// Unbound identifiers other than x, pi and e.
  std::set<std::string> identifiers() const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace jfp
