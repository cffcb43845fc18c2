#pragma once

// Declarative description of a linear fractional integral equation
//   sum_k a_k(x) I^{mu_k}[b_k(x) u](x) = f(x),   x in [-1, 1],
// optionally bordered by extra unknown constants and point conditions.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jfp/expression.hpp"
#include "jfp/param.hpp"

namespace jfp {

/// (1+x)^weight * expr(x), with expr smooth in the mapped variable.
struct WeightedPart {
  Param weight{0};
  Expression expr;
};

/// a(x) I^order [b(x) u]; order 0 is the identity.
struct FIETerm {
  Expression outer;
  Param order{0};
  Expression inner;
};

/// Right-hand side given as samples of f at points x_i in (-1, 1].
struct RhsSamples {
  Param weight{0};
  std::vector<double> x, values;
};

struct BasisOverrides {
  std::optional<long> k_star;
  std::optional<Param> alpha, beta, b, p;
};

/// Extra unknown c whose FIE column is `column` and which contributes
/// c * reconstruct(x) to the reconstructed solution.
struct BorderConstant {
  std::string name;
  std::vector<WeightedPart> column;
  Expression reconstruct;
};

/// Reconstructed solution u = I^order v + sum_i c_i phi_i(x) + extra(x).
struct Reconstruction {
  Param order{0};
  Expression extra = Expression::parse("0");
};

/// Point condition u(at) = value on the reconstructed solution.
struct PointCondition {
  Expression at, value;
};

struct ExactSolution {
  enum class Kind { none, mittag_leffler, expression };
  Kind kind = Kind::none;
  /// mittag_leffler: scale * (1+x)^{nu-1} E_{mu,nu}(-lambda (1+x)^mu).
  Param mu{1}, nu{1};
  Expression lambda, scale;
  /// expression: closed form in x.
  Expression expr;
};

struct FIEProblem {
  std::string name;
  /// Named values, evaluated in order; later entries may use earlier ones.
  std::vector<std::pair<std::string, Expression>> parameters;
  std::vector<FIETerm> terms;
  std::vector<WeightedPart> rhs;
  std::optional<RhsSamples> rhs_samples;
  /// Exponent nu - 1 of the leading singularity (1+x)^{nu-1} of the solution;
  /// defaults to the smallest rhs weight.
  std::optional<Param> solution_weight;
  BasisOverrides basis;
  ExactSolution exact;
  std::vector<BorderConstant> constants;
  std::optional<Reconstruction> reconstruct;
  std::vector<PointCondition> conditions;

  /// Parameters evaluated at the working precision.
  Environment environment() const;
  /// Replaces (or appends) a named parameter.
  void set_parameter(const std::string& name, const std::string& value);
  /// Nonzero orders; throws ConfigError when the problem is malformed.
  std::vector<Param> orders() const;
  Param leading_weight() const;
  bool bordered() const { return !constants.empty() || !conditions.empty(); }
  void validate() const;
};

/// Parses the JSON problem format. Decimal orders require allow_irrational.
FIEProblem parse_problem(std::string_view json_text, bool allow_irrational = false);
FIEProblem load_problem(const std::filesystem::path& path, bool allow_irrational = false);

/// u + lambda I^mu u = (1+x)^{nu-1} with its exact solution attached.
FIEProblem mittag_leffler_problem(const Param& mu, const std::string& lambda = "1", const Param& nu = 1);

}  // namespace jfp
