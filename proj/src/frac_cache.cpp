#include "jfp/frac_cache.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "jfp/errors.hpp"

namespace jfp {

namespace {

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == '/') c = 'd';
    else if (c == '*') c = 'x';
    else if (c == '-') c = 'm';
  return s;
}

Param parse_param(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw ConfigError(std::string("cache entry lacks '") + key + "'");
  return Param::parse(j[key].get<std::string>(), true);
}

}  // namespace

std::string cache_key(const JFPParams& params, const Param& mu, std::size_t n, long q) {
  return sanitize("I_a" + params.jacobi.alpha.str() + "_b" + params.jacobi.beta.str() + "_w" + params.b.str() + "_p" +
                  params.p.str() + "_mu" + mu.str() + "_N" + std::to_string(n) + "_q" + std::to_string(q));
}

std::string serialize_matrix(const FracIntMatrix& m) {
  nlohmann::json j;
  j["alpha"] = m.params.jacobi.alpha.str();
  j["beta"] = m.params.jacobi.beta.str();
  j["b"] = m.params.b.str();
  j["p"] = m.params.p.str();
  j["mu"] = m.mu.str();
  j["k_star"] = m.k_star;
  j["algorithm"] = to_string(m.algorithm);
  j["precision"] = m.precision;
  j["error_estimate"] = m.error_estimate;
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& col : m.columns) {
    nlohmann::json c = nlohmann::json::array();
    for (const Real& v : col) c.push_back(v.to_string());
    cols.push_back(std::move(c));
  }
  j["columns"] = std::move(cols);
  return j.dump(1);
}

FracIntMatrix deserialize_matrix(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed matrix cache: ") + e.what());
  }
  FracIntMatrix m;
  m.params = JFPParams::checked(parse_param(j, "alpha"), parse_param(j, "beta"), parse_param(j, "b"),
                                parse_param(j, "p"));
  m.mu = parse_param(j, "mu");
  m.k_star = j.at("k_star").get<long>();
  m.algorithm = j.at("algorithm").get<std::string>() == "triangular" ? FracAlgorithm::triangular
                                                                     : FracAlgorithm::recurrence;
  m.precision = j.at("precision").get<long>();
  m.error_estimate = j.at("error_estimate").get<double>();
  for (const auto& c : j.at("columns")) {
    std::vector<Real> col;
    col.reserve(c.size());
    for (const auto& v : c) col.emplace_back(v.get<std::string>(), m.precision);
    m.columns.push_back(std::move(col));
  }
  return m;
}

void save_matrix(const std::filesystem::path& path, const FracIntMatrix& m) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << serialize_matrix(m) << '\n';
}

FracIntMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize_matrix(ss.str());
}

}  // namespace jfp
