#include "jfp/problem.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "jfp/errors.hpp"

namespace jfp {

using json = nlohmann::ordered_json;

Environment FIEProblem::environment() const {
  Environment env;
  for (const auto& [name, expr] : parameters) env[name] = expr.eval(env);
  return env;
}

void FIEProblem::set_parameter(const std::string& name, const std::string& value) {
  Expression e = Expression::parse(value);
  for (auto& [n, expr] : parameters)
    if (n == name) {
      expr = e;
      return;
    }
  parameters.emplace_back(name, e);
}

std::vector<Param> FIEProblem::orders() const {
  std::vector<Param> out;
  for (const auto& t : terms) {
    if (t.order.sign() < 0) throw ConfigError("integral orders must be non-negative, got " + t.order.str());
    if (!t.order.is_zero()) out.push_back(t.order);
  }
  return out;
}

Param FIEProblem::leading_weight() const {
  if (solution_weight) return *solution_weight;
  std::optional<Param> w;
  for (const auto& part : rhs)
    if (!w || part.weight < *w) w = part.weight;
  if (rhs_samples && (!w || rhs_samples->weight < *w)) w = rhs_samples->weight;
  return w.value_or(Param(0));
}

void FIEProblem::validate() const {
  if (terms.empty()) throw ConfigError("problem '" + name + "' has no operator terms");
  if (rhs.empty() && !rhs_samples) throw ConfigError("problem '" + name + "' has no right-hand side");
  if (rhs_samples && rhs_samples->x.size() != rhs_samples->values.size())
    throw ConfigError("rhs sample arrays differ in length");
  auto ords = orders();
  for (std::size_t k = 1; k < ords.size(); ++k) {
    Param ratio = ords[k] / ords[0];
    if (!ratio.is_rational())
      throw ConfigError("order " + ords[k].str() + " is not a rational multiple of " + ords[0].str());
  }
  if (conditions.size() != constants.size())
    throw ConfigError("bordered problem needs one condition per constant, got " + std::to_string(conditions.size()) +
                      " conditions for " + std::to_string(constants.size()) + " constants");
  // every identifier must be bound
  Environment env = environment();
  auto check = [&](const Expression& e, const std::string& where) {
    for (const auto& id : e.identifiers()) {
      bool bound = env.count(id) > 0;
      for (const auto& c : constants) bound = bound || c.name == id;
      if (!bound) throw ConfigError("unbound identifier '" + id + "' in " + where + ": " + e.text());
    }
  };
  for (const auto& t : terms) {
    check(t.outer, "term coefficient");
    check(t.inner, "term inner coefficient");
  }
  for (const auto& r : rhs) check(r.expr, "rhs");
}

namespace {

std::string as_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    std::ostringstream s;
    s.precision(17);
    s << v.get<double>();
    return s.str();
  }
  throw ConfigError("expected a number or string, got " + v.dump());
}

Param parse_order(const json& v, bool allow_irrational) {
  std::string t = as_text(v);
  try {
    return Param::parse(t, allow_irrational);
  } catch (const ConfigError& e) {
    if (!allow_irrational && t.find('.') != std::string::npos)
      throw ConfigError("decimal value \"" + t + "\" needs the irrational acknowledgment (--irrational)");
    throw;
  }
}

std::vector<WeightedPart> parse_parts(const json& v, bool allow_irrational) {
  std::vector<WeightedPart> out;
  auto one = [&](const json& p) {
    WeightedPart w;
    if (p.is_object()) {
      if (p.contains("weight")) w.weight = parse_order(p["weight"], allow_irrational);
      w.expr = Expression::parse(as_text(p.value("expr", json("1"))));
    } else {
      w.expr = Expression::parse(as_text(p));
    }
    out.push_back(w);
  };
  if (v.is_array())
    for (const auto& p : v) one(p);
  else
    one(v);
  return out;
}

}  // namespace

FIEProblem parse_problem(std::string_view json_text, bool allow_irrational) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("problem file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("problem file must contain a JSON object");
  try {
    FIEProblem p;
    p.name = j.value("name", std::string("problem"));
    if (j.contains("parameters"))
      for (const auto& [k, v] : j["parameters"].items()) p.parameters.emplace_back(k, Expression::parse(as_text(v)));
    if (!j.contains("terms")) throw ConfigError("problem file lacks 'terms'");
    for (const auto& t : j["terms"]) {
      FIETerm term;
      term.order = parse_order(t.value("order", json("0")), allow_irrational);
      term.outer = Expression::parse(as_text(t.value("coeff", json("1"))));
      term.inner = Expression::parse(as_text(t.value("inner", json("1"))));
      p.terms.push_back(term);
    }
    if (j.contains("rhs")) p.rhs = parse_parts(j["rhs"], allow_irrational);
    if (j.contains("rhs_samples")) {
      const auto& s = j["rhs_samples"];
      RhsSamples r;
      if (s.contains("weight")) r.weight = parse_order(s["weight"], allow_irrational);
      r.x = s.at("x").get<std::vector<double>>();
      r.values = s.at("values").get<std::vector<double>>();
      p.rhs_samples = r;
    }
    if (j.contains("solution_weight")) p.solution_weight = parse_order(j["solution_weight"], allow_irrational);
    if (j.contains("basis")) {
      const auto& b = j["basis"];
      if (b.contains("k_star")) p.basis.k_star = b["k_star"].get<long>();
      if (b.contains("alpha")) p.basis.alpha = parse_order(b["alpha"], allow_irrational);
      if (b.contains("beta")) p.basis.beta = parse_order(b["beta"], allow_irrational);
      if (b.contains("b")) p.basis.b = parse_order(b["b"], allow_irrational);
      if (b.contains("p")) p.basis.p = parse_order(b["p"], allow_irrational);
    }
    if (j.contains("exact")) {
      const auto& e = j["exact"];
      std::string type = e.value("type", std::string("expression"));
      if (type == "mittag_leffler") {
        p.exact.kind = ExactSolution::Kind::mittag_leffler;
        p.exact.mu = parse_order(e.at("mu"), allow_irrational);
        p.exact.nu = parse_order(e.value("nu", json("1")), allow_irrational);
        p.exact.lambda = Expression::parse(as_text(e.value("lambda", json("1"))));
        p.exact.scale = Expression::parse(as_text(e.value("scale", json("1"))));
      } else if (type == "expression") {
        p.exact.kind = ExactSolution::Kind::expression;
        p.exact.expr = Expression::parse(as_text(e.at("expr")));
      } else {
        throw ConfigError("unknown exact solution type '" + type + "'");
      }
    }
    if (j.contains("constants"))
      for (const auto& c : j["constants"]) {
        BorderConstant bc;
        bc.name = c.at("name").get<std::string>();
        bc.column = parse_parts(c.at("column"), allow_irrational);
        bc.reconstruct = Expression::parse(as_text(c.value("reconstruct", json("0"))));
        p.constants.push_back(bc);
      }
    if (j.contains("reconstruct")) {
      Reconstruction r;
      r.order = parse_order(j["reconstruct"].value("order", json("0")), allow_irrational);
      r.extra = Expression::parse(as_text(j["reconstruct"].value("extra", json("0"))));
      p.reconstruct = r;
    }
    if (j.contains("conditions"))
      for (const auto& c : j["conditions"])
        p.conditions.push_back({Expression::parse(as_text(c.at("at"))), Expression::parse(as_text(c.at("value")))});
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed problem file: ") + e.what());
  }
}

FIEProblem load_problem(const std::filesystem::path& path, bool allow_irrational) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), allow_irrational);
}

FIEProblem mittag_leffler_problem(const Param& mu, const std::string& lambda, const Param& nu) {
  FIEProblem p;
  p.name = "mittag-leffler";
  p.parameters.emplace_back("lambda", Expression::parse(lambda));
  p.terms.push_back({Expression(), Param(0), Expression()});
  p.terms.push_back({Expression::parse("lambda"), mu, Expression()});
  p.rhs.push_back({nu - Param(1), Expression()});
  p.exact.kind = ExactSolution::Kind::mittag_leffler;
  p.exact.mu = mu;
  p.exact.nu = nu;
  p.exact.lambda = Expression::parse("lambda");
  p.exact.scale = Expression::parse("gamma(" + nu.str() + ")");
  p.validate();
  return p;
}

}  // namespace jfp
