#include "jfp/expression.hpp"

#include <cctype>
#include <functional>
#include <vector>

#include "jfp/errors.hpp"

namespace jfp {

struct Expression::Node {
  enum class Kind { number, identifier, negate, add, sub, mul, div, pow, call };
  Kind kind = Kind::number;
  std::string text;  // number literal, identifier or function name
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

const std::map<std::string, std::function<Real(const Real&)>, std::less<>>& functions() {
  static const std::map<std::string, std::function<Real(const Real&)>, std::less<>> table{
      {"exp", [](const Real& v) { return mp::exp(v); }},
      {"log", [](const Real& v) { return mp::log(v); }},
      {"sqrt", [](const Real& v) { return mp::sqrt(v); }},
      {"abs", [](const Real& v) { return mp::abs(v); }},
      {"sin", [](const Real& v) { return mp::sin(v); }},
      {"cos", [](const Real& v) { return mp::cos(v); }},
      {"erf", [](const Real& v) { return erf(v); }},
      {"erfc", [](const Real& v) { return erfc(v); }},
      {"gamma", [](const Real& v) { return gamma(v); }},
  };
  return table;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression \"" + std::string(s_) + "\": " + what + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(Kind k, std::string text, std::vector<NodePtr> args = {}) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->text = std::move(text);
    n->args = std::move(args);
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Kind::add, "", {lhs, term()});
      else if (accept('-'))
        lhs = make(Kind::sub, "", {lhs, term()});
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Kind::mul, "", {lhs, unary()});
      else if (accept('/'))
        lhs = make(Kind::div, "", {lhs, unary()});
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::negate, "", {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::pow, "", {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (accept('(')) {
      NodePtr n = expr();
      if (!accept(')')) fail("missing ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (accept('(')) {
        if (!functions().count(name)) fail("unknown function '" + name + "'");
        NodePtr arg = expr();
        if (!accept(')')) fail("missing ')'");
        return make(Kind::call, name, {arg});
      }
      return make(Kind::identifier, name);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string lit(s_.substr(start, pos_ - start));
    if (lit == ".") fail("malformed number");
    return make(Kind::number, lit);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

Real evaluate(const Expression::Node& n, const Real* x, const Environment& env) {
  switch (n.kind) {
    case Kind::number:
      return Real(std::string_view(n.text));
    case Kind::identifier: {
      if (n.text == "x") {
        if (!x) throw ConfigError("expression depends on x where a constant is required");
        return *x;
      }
      if (auto it = env.find(n.text); it != env.end()) return it->second;
      if (n.text == "pi") return mp::pi();
      if (n.text == "e") return mp::exp(Real(1));
      throw ConfigError("unbound identifier '" + n.text + "'");
    }
    case Kind::negate:
      return -evaluate(*n.args[0], x, env);
    case Kind::call:
      return functions().find(n.text)->second(evaluate(*n.args[0], x, env));
    default:
      break;
  }
  Real a = evaluate(*n.args[0], x, env);
  Real b = evaluate(*n.args[1], x, env);
  switch (n.kind) {
    case Kind::add:
      return a + b;
    case Kind::sub:
      return a - b;
    case Kind::mul:
      return a * b;
    case Kind::div:
      return a / b;
    default:
      return mp::pow(a, b);
  }
}

void collect(const Expression::Node& n, std::set<std::string>& out) {
  if (n.kind == Kind::identifier) out.insert(n.text);
  for (const auto& a : n.args) collect(*a, out);
}

}  // namespace

Expression::Expression() : text_("1") {
  auto one = std::make_shared<Node>();
  one->text = "1";
  root_ = one;
}

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.text_ = std::string(text);
  return e;
}

Real Expression::eval(const Real& x, const Environment& env) const { return evaluate(*root_, &x, env); }

Real Expression::eval(const Environment& env) const { return evaluate(*root_, nullptr, env); }

double Expression::eval_double(double x, const Environment& env) const {
  mp::ScopedPrecision g(64);
  return eval(Real(x), env).to_double();
}

bool Expression::depends_on(std::string_view name) const {
  std::set<std::string> ids;
  collect(*root_, ids);
  return ids.count(std::string(name)) > 0;
}

std::set<std::string> Expression::identifiers() const {
  std::set<std::string> ids;
  collect(*root_, ids);
  ids.erase("x");
  ids.erase("pi");
  ids.erase("e");
  return ids;
}

}  // namespace jfp
