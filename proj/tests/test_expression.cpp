#include <doctest.h>

#include <cmath>
#include <string>

#include "jfp/errors.hpp"
#include "jfp/expression.hpp"
#include "jfp/problem.hpp"

using namespace jfp;
using mp::Real;
using mp::ScopedPrecision;

namespace {

double ev(const std::string& text, double x = 0, const Environment& env = {}) {
  return Expression::parse(text).eval_double(x, env);
}

}  // namespace

TEST_CASE("operator precedence and associativity") {
  CHECK(ev("-x^2", 3) == -9);
  CHECK(ev("2^3^2") == 512);
  CHECK(ev("1 + 2 * 3 - 4 / 2") == 5);
  CHECK(ev("(1 + 2) * 3") == 9);
  CHECK(ev("2 * -3") == -6);
  CHECK(ev("1.5e2 + .5") == 150.5);
  CHECK(ev("2 * e") == doctest::Approx(2 * std::exp(1.0)));
}

TEST_CASE("functions and constants at full precision") {
  ScopedPrecision g(200);
  Real v = Expression::parse("1/gamma(3/2)").eval();
  CHECK(mp::abs(v - 2 / mp::sqrt(mp::pi())) <= Real(1e-58));
  Real w = Expression::parse("erfc(sqrt(1 + x))").eval(Real(0));
  CHECK(mp::abs(w - erfc(Real(1))) <= Real(1e-58));
  CHECK(ev("exp(log(2)) + abs(-1) + sin(0) + cos(0) + erf(0)") == doctest::Approx(4.0));
  CHECK(ev("pi") == doctest::Approx(M_PI));
}

TEST_CASE("environment binding and introspection") {
  ScopedPrecision g(64);
  Environment env{{"lambda", Real(3)}};
  Expression e = Expression::parse("lambda^2 * (1 + x)");
  CHECK(e.eval_double(1, env) == 18);
  CHECK(e.depends_on("x"));
  CHECK_FALSE(Expression::parse("lambda").depends_on("x"));
  CHECK(e.identifiers() == std::set<std::string>{"lambda"});
  Environment shadow{{"pi", Real(3)}};
  CHECK(ev("pi", 0, shadow) == 3);
  CHECK(Expression().eval_double(5) == 1);
}

TEST_CASE("malformed expressions") {
  ScopedPrecision g(64);
  CHECK_THROWS_AS(Expression::parse("1 +"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("foo(1)"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("(1 + 2"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("1 2"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("lambda").eval(), ConfigError);
  CHECK_THROWS_AS(Expression::parse("x").eval(), ConfigError);
}

TEST_CASE("problem files parse and validate") {
  ScopedPrecision g(64);
  for (const char* name : {"mittag1", "mittag2", "example3", "multi-order", "varcoeff", "bagley-torvik-caputo",
                           "bagley-torvik-rl"}) {
    FIEProblem p = load_problem(std::string(JFP_SOURCE_DIR) + "/problems/" + name + ".json");
    CHECK(p.name == name);
    CHECK_FALSE(p.terms.empty());
  }
  FIEProblem bt = load_problem(std::string(JFP_SOURCE_DIR) + "/problems/bagley-torvik-rl.json");
  CHECK(bt.bordered());
  CHECK(bt.leading_weight() == Param(-1, 2));
  CHECK(bt.orders().size() == 2);
}

TEST_CASE("problem format errors") {
  CHECK_THROWS_AS(parse_problem("not json"), ConfigError);
  CHECK_THROWS_AS(parse_problem(R"({"rhs": [1]})"), ConfigError);
  CHECK_THROWS_AS(parse_problem(R"({"terms": [{"order": "0"}]})"), ConfigError);
  std::string decimal = R"({"terms": [{"order": "0"}, {"order": "0.3"}], "rhs": ["1"]})";
  try {
    parse_problem(decimal);
    FAIL("decimal order accepted without acknowledgment");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("--irrational") != std::string::npos);
  }
  FIEProblem p = parse_problem(decimal, true);
  CHECK_FALSE(p.orders()[0].is_rational());
  CHECK_THROWS_AS(parse_problem(R"({"terms": [{"order": "1/2"}, {"order": "1/pi"}], "rhs": ["1"]})"), ConfigError);
  CHECK_THROWS_AS(parse_problem(R"({"terms": [{"coeff": "mu", "order": "1/2"}], "rhs": ["1"]})"), ConfigError);
  CHECK_THROWS_AS(parse_problem(R"({"terms": [{"order": "1/2"}], "rhs": ["1"],
      "constants": [{"name": "a", "column": ["1"]}]})"),
                  ConfigError);
}

TEST_CASE("parameters evaluate in order and can be overridden") {
  ScopedPrecision g(64);
  FIEProblem p = parse_problem(R"({"parameters": {"a": "2", "b": "a^2"},
      "terms": [{"order": "0"}, {"coeff": "b", "order": "1/2"}], "rhs": ["1"]})");
  CHECK(p.environment().at("b").to_double() == 4);
  p.set_parameter("a", "3");
  CHECK(p.environment().at("b").to_double() == 9);
  p.set_parameter("c", "1");
  CHECK(p.environment().count("c") == 1);
}
