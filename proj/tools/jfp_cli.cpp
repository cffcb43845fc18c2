// jfp: fractional integration matrices, FIE solves, Mittag-Leffler tables,
// heat/wave runs and the sum-space comparison.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cfloat>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jfp/errors.hpp"
#include "jfp/fie_solver.hpp"
#include "jfp/frac_cache.hpp"
#include "jfp/frac_ops.hpp"
#include "jfp/heatwave.hpp"
#include "jfp/mittag_leffler.hpp"
#include "jfp/sumspace_bench.hpp"

namespace {

using namespace jfp;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr const char* kHeatDatum = "exp(-cos(2*x) + sin(x)/2) - 2*sin(sin(x))";

struct Common {
  std::string format = "csv";
  std::string output;
  double delta = 1e-16;
  std::string precision = "auto";
  bool irrational = false;
  bool quiet = false;
};

Common common;

template <class... Args>
void log(fmt::format_string<Args...> f, Args&&... args) {
  if (!common.quiet) fmt::print(stderr, "[jfp] {}\n", fmt::format(f, std::forward<Args>(args)...));
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) { return fmt::format("{:.17g}", v); }

json json_num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

void emit(const std::string& text) {
  if (common.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(common.output, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + common.output);
  f << text;
  log("wrote {}", common.output);
}

void add_common(CLI::App* app, bool with_precision = false) {
  app->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("-o,--output", common.output, "Output file (default: stdout)");
  app->add_option("--delta", common.delta, "Target accuracy of fractional integration matrices")
      ->check(CLI::Range(1e-300, 0.1));
  app->add_flag("--irrational", common.irrational, "Accept decimal orders, treated as irrational (triangular solves)");
  app->add_flag("-q,--quiet", common.quiet, "Suppress log lines on stderr");
  if (with_precision)
    app->add_option("--precision", common.precision, "Working precision: auto or a number of bits");
}

Param param(const std::string& text) { return Param::parse(text, common.irrational); }

std::optional<long> fixed_bits() {
  if (common.precision == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    long q = std::stol(common.precision, &used);
    if (used == common.precision.size() && q >= 16) return q;
  } catch (const std::exception&) {
  }
  throw ConfigError("--precision must be 'auto' or an integer number of bits >= 16, got '" + common.precision + "'");
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      long v = std::stol(tok);
      if (v <= 0) throw ConfigError("sizes must be positive");
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::invalid_argument&) {
      throw ConfigError("bad size list '" + text + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty size list");
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad number list '" + text + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

std::vector<double> uniform(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

// ---------------------------------------------------------------- fracmat

struct FracmatArgs {
  std::string alpha = "0", beta = "0", b = "0", p, mu = "1/2";
  std::size_t n = 50;
  std::string cache;
  bool verify = false;
};

int run_fracmat(const FracmatArgs& a) {
  auto t0 = Clock::now();
  Param mu = param(a.mu);
  Param p = a.p.empty() ? Param(1) / mu : param(a.p);
  JFPParams params = JFPParams::checked(param(a.alpha), param(a.beta), param(a.b), p);
  long k_star = k_star_of(params, mu);
  std::optional<long> bits = fixed_bits();
  std::string policy = bits ? "fixed" : "auto";
  auto build = [&] {
    return bits ? build_at_precision(params, mu, a.n, *bits) : pseudo_stabilized(params, mu, a.n, common.delta);
  };
  FracIntMatrix m;
  if (!a.cache.empty()) {
    long key_q = bits ? *bits : 0;
    m = cached_build(a.cache, params, mu, a.n, key_q, build);
    log("cache {}", (std::filesystem::path(a.cache) / (cache_key(params, mu, a.n, key_q) + ".json")).string());
  } else {
    m = build();
  }
  if (!bits && recurrence_applicable(params, mu)) {
    ErrorModel model = simulate_error(params, mu, 53, a.n);
    PrecisionChoice c = choose_precision(a.n, common.delta, model);
    log("simulation q0=53 m*={} selection q={}", c.m_star, c.q);
  }
  log("fracmat {} mu={} N={} k*={} algorithm={} q={} error_estimate={:.3e} ({:.2f}s)", params.str(), mu.str(), a.n,
      k_star, to_string(m.algorithm), m.precision, m.error_estimate, seconds_since(t0));
  std::optional<double> measured;
  if (a.verify) {
    FracIntMatrix ref = build_at_precision(params, mu, a.n, 2 * m.precision);
    measured = m.max_difference(ref).to_double();
    log("max difference vs {}-bit rebuild: {:.3e}", 2 * m.precision, *measured);
  }
  if (common.format == "json") {
    json j = json::parse(serialize_matrix(m));
    j["N"] = a.n;
    j["precision_policy"] = policy;
    j["delta"] = common.delta;
    if (measured) j["verified_error"] = *measured;
    emit(j.dump(1) + "\n");
    return 0;
  }
  std::string out = "# jfp fracmat v1\n";
  out += fmt::format("# alpha={},beta={},b={},p={},mu={},N={},k_star={},algorithm={},precision={},precision_policy={},"
                     "delta={},error_estimate={}",
                     params.jacobi.alpha.str(), params.jacobi.beta.str(), params.b.str(), params.p.str(), mu.str(),
                     a.n, k_star, to_string(m.algorithm), m.precision, policy, num(common.delta),
                     num(m.error_estimate));
  if (measured) out += ",verified_error=" + num(*measured);
  out += "\nrow,col,value\n";
  for (std::size_t j = 0; j < m.columns.size(); ++j)
    for (std::size_t i = 0; i < m.columns[j].size(); ++i)
      out += fmt::format("{},{},{}\n", i, j, m.columns[j][i].to_string());
  emit(out);
  return 0;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string file;
  std::string n = "auto";
  std::vector<std::string> params;
  std::optional<long> k_star;
  std::string alpha, beta, b, p;
  double h = 0.01;
  std::size_t n_max = 512;
  bool coefficients = false;
};

FIEProblem load_with_params(const std::string& file, const std::vector<std::string>& assignments) {
  FIEProblem problem = load_problem(file, common.irrational);
  for (const std::string& s : assignments) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects name=value, got '" + s + "'");
    problem.set_parameter(s.substr(0, eq), s.substr(eq + 1));
  }
  return problem;
}

BasisOverrides overrides_from(const SolveArgs& a) {
  BasisOverrides o;
  o.k_star = a.k_star;
  if (!a.alpha.empty()) o.alpha = param(a.alpha);
  if (!a.beta.empty()) o.beta = param(a.beta);
  if (!a.b.empty()) o.b = param(a.b);
  if (!a.p.empty()) o.p = param(a.p);
  return o;
}

SolutionFunction run_solver(const FIEProblem& problem, const BasisSelection& basis, const std::string& n,
                            std::size_t n_max) {
  SolveOptions so;
  so.delta = common.delta;
  so.n_max = n_max;
  if (std::optional<long> q = fixed_bits()) so.build_bits = *q;
  if (n == "auto") {
    if (problem.bordered()) {
      // doubling with the bordered system
      for (std::size_t m = so.n_start;; m *= 2) {
        SolutionFunction s = solve_bordered(problem, basis, m, so);
        if (s.converged) return s;
        if (m * 2 > n_max)
          throw ConvergenceError(fmt::format("coefficients did not converge by N = {} (tail {:.3e})", m, s.tail));
      }
    }
    return solve_auto(problem, basis, so);
  }
  std::size_t size = parse_sizes(n).front();
  return problem.bordered() ? solve_bordered(problem, basis, size, so) : solve(problem, basis, size, so);
}

int run_solve(const SolveArgs& a) {
  auto t0 = Clock::now();
  FIEProblem problem = load_with_params(a.file, a.params);
  BasisSelection basis = select_basis(problem, overrides_from(a));
  SolutionFunction s = run_solver(problem, basis, a.n, a.n_max);
  std::optional<double> err;
  if (problem.exact.kind != ExactSolution::Kind::none) err = max_error(s, problem, a.h);
  log("solve {} basis {} k*={} N={} q={} frac_error={:.3e} residual={:.3e} tail={:.3e} converged={}{} ({:.2f}s)",
      problem.name, basis.params.str(), basis.k_star, s.N, s.frac_precision, s.frac_error, s.residual, s.tail,
      s.converged, err ? fmt::format(" max_error={:.3e}", *err) : std::string(), seconds_since(t0));

  std::vector<double> xs = grid(a.h, basis.params.b.sign() >= 0 || s.vanishes_at_left);
  if (common.format == "json") {
    json j;
    j["format"] = "jfp solve v1";
    j["problem"] = problem.name;
    j["basis"] = {{"alpha", basis.params.jacobi.alpha.str()},
                  {"beta", basis.params.jacobi.beta.str()},
                  {"b", basis.params.b.str()},
                  {"p", basis.params.p.str()},
                  {"k_star", basis.k_star}};
    j["N"] = s.N;
    j["delta"] = common.delta;
    j["frac_precision"] = s.frac_precision;
    j["frac_error"] = s.frac_error;
    j["residual"] = s.residual;
    j["tail"] = s.tail;
    j["converged"] = s.converged;
    j["max_error"] = err ? json(*err) : json(nullptr);
    json constants = json::object();
    for (std::size_t k = 0; k < s.constants.size(); ++k) constants[s.constant_names[k]] = s.constants[k];
    j["constants"] = constants;
    j["coefficients"] = s.coeffs;
    json pts = json::array();
    for (double x : xs) {
      std::optional<double> e = exact_value(problem, x);
      pts.push_back({{"x", x}, {"u", solution_value(s, x)}, {"exact", e ? json(*e) : json(nullptr)}});
    }
    j["grid"] = pts;
    emit(j.dump(1) + "\n");
    return 0;
  }
  std::string out = "# jfp solve v1\n";
  out += fmt::format("# problem={},alpha={},beta={},b={},p={},k_star={},N={},residual={},tail={},converged={}",
                     problem.name, basis.params.jacobi.alpha.str(), basis.params.jacobi.beta.str(),
                     basis.params.b.str(), basis.params.p.str(), basis.k_star, s.N, num(s.residual), num(s.tail),
                     s.converged ? "true" : "false");
  for (std::size_t k = 0; k < s.constants.size(); ++k) out += fmt::format(",{}={}", s.constant_names[k], num(s.constants[k]));
  if (err) out += ",max_error=" + num(*err);
  out += "\n";
  if (a.coefficients) {
    out += "k,coefficient\n";
    for (std::size_t k = 0; k < s.coeffs.size(); ++k) out += fmt::format("{},{}\n", k, num(s.coeffs[k]));
  } else {
    out += "x,u,exact,error\n";
    for (double x : xs) {
      double u = solution_value(s, x);
      std::optional<double> e = exact_value(problem, x);
      out += fmt::format("{},{},{},{}\n", num(x), num(u), e ? num(*e) : "", e ? num(std::abs(u - *e)) : "");
    }
  }
  emit(out);
  return 0;
}

// ---------------------------------------------------------------- ml

struct MLArgs {
  std::string mu = "1/2", nu = "1";
  double lambda = 1;
  std::string z;
  double h = 0.01;
};

int run_ml(const MLArgs& a) {
  Param mu = param(a.mu), nu = param(a.nu);
  MLParams mp = MLParams::checked(mu, nu);
  double tol = std::max(common.delta, 1e-300);
  std::string out;
  json rows = json::array();
  if (!a.z.empty()) {
    out = "# jfp ml v1\nz,value\n";
    for (double z : parse_doubles(a.z)) {
      double v = ml_eval(mp, z, std::max(tol, 1e-16));
      out += fmt::format("{},{}\n", num(z), num(v));
      rows.push_back({{"z", z}, {"value", v}});
    }
  } else {
    out = fmt::format("# jfp ml v1\n# solution of u + lambda I^mu u = (1+x)^(nu-1)/Gamma(nu): mu={},nu={},lambda={}\n"
                      "x,value\n",
                      mu.str(), nu.str(), num(a.lambda));
    for (double x : grid(a.h, nu.to_double() >= 1)) {
      double v = ml_solution(mu, nu, a.lambda, x, std::max(tol, 1e-16));
      out += fmt::format("{},{}\n", num(x), num(v));
      rows.push_back({{"x", x}, {"value", v}});
    }
  }
  if (common.format == "json") {
    json j;
    j["format"] = "jfp ml v1";
    j["mu"] = mu.str();
    j["nu"] = nu.str();
    if (a.z.empty()) j["lambda"] = a.lambda;
    j["rows"] = rows;
    emit(j.dump(1) + "\n");
  } else {
    emit(out);
  }
  return 0;
}

// ---------------------------------------------------------------- heatwave

struct HeatArgs {
  std::string mu;
  double T = 1;
  std::string ic = kHeatDatum;
  std::size_t grid = 256;
  double tol = DBL_EPSILON;
  std::string p = "5";
  std::size_t nx = 65;
  std::size_t nt = 21;
  std::size_t n = 0;
  std::size_t n_max = 1024;
  std::string metadata;
};

int run_heatwave(const HeatArgs& a) {
  auto t0 = Clock::now();
  Param mu = param(a.mu);
  Expression f = Expression::parse(a.ic);
  PeriodicIC ic = fourier_decompose(sample_periodic([&](double x) { return f.eval_double(x); }, a.grid), a.tol);
  HeatWaveOptions o;
  o.p = param(a.p);
  o.delta = common.delta;
  o.n = a.n;
  o.n_max = a.n_max;
  HeatWaveSolution sol = solve_heatwave(ic, mu, a.T, o);
  std::vector<double> xs = uniform(0, 2 * M_PI, a.nx), ts = uniform(0, a.T, a.nt);
  Dense<double> u = evaluate_xt(sol, xs, ts);
  log("heatwave mu={} T={} N_f={} lambda={:.6g} p={} k*={} master N={} q={} ({:.2f}s)", mu.str(), num(a.T), ic.N_f,
      sol.lambda, sol.p.str(), sol.k_star, sol.master.N, sol.master.frac_precision, seconds_since(t0));

  json meta;
  meta["format"] = "jfp heatwave v1";
  meta["mu"] = mu.str();
  meta["T"] = a.T;
  meta["N_f"] = ic.N_f;
  meta["delta"] = common.delta;
  meta["fourier_tol"] = a.tol;
  meta["grid_size"] = a.grid;
  meta["initial_data"] = a.ic;
  meta["p"] = sol.p.str();
  meta["k_star"] = sol.k_star;
  meta["master_lambda"] = sol.lambda;
  meta["master_N"] = sol.master.N;
  meta["master_converged"] = sol.master.converged;

  if (common.format == "json") {
    json j = meta;
    j["x"] = xs;
    j["t"] = ts;
    json rows = json::array();
    for (std::size_t i = 0; i < ts.size(); ++i) {
      json r = json::array();
      for (std::size_t k = 0; k < xs.size(); ++k) r.push_back(u(i, k));
      rows.push_back(r);
    }
    j["u"] = rows;
    emit(j.dump(1) + "\n");
    return 0;
  }
  std::string out = "t\\x";
  for (double x : xs) out += "," + num(x);
  out += "\n";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out += num(ts[i]);
    for (std::size_t k = 0; k < xs.size(); ++k) out += "," + num(u(i, k));
    out += "\n";
  }
  emit(out);
  std::string meta_path = !a.metadata.empty() ? a.metadata : (common.output.empty() ? "" : common.output + ".json");
  if (!meta_path.empty()) {
    std::ofstream m(meta_path, std::ios::binary);
    if (!m) throw ConfigError("cannot write " + meta_path);
    m << meta.dump(1) << "\n";
    log("wrote {}", meta_path);
  } else {
    log("metadata {}", meta.dump());
  }
  return 0;
}

// ---------------------------------------------------------------- bench-sumspace

struct BenchArgs {
  std::string lambdas = "1,2,3";
  std::size_t n = 0;
  std::size_t jfp_n = 0;
  double target = 1e-14;
  long max_bits = 4096;
  bool no_conditions = false;
};

int run_bench(const BenchArgs& a) {
  auto t0 = Clock::now();
  CompareOptions o;
  o.sumspace_n = a.n;
  o.jfp_n = a.jfp_n;
  o.delta = common.delta;
  o.target = a.target;
  o.max_bits = a.max_bits;
  o.conditions = !a.no_conditions;
  if (o.sumspace_n % 2 != 0) throw ConfigError("--N must be even");
  std::vector<ComparisonRow> rows = compare_report(parse_doubles(a.lambdas), o);
  for (const auto& r : rows)
    log("lambda={} sum-space N={} bits={} log10 max|c|={:.3f} double error={:.3e}; JFP N={} max|c|={:.3f} error={:.3e}",
        num(r.lambda), r.sumspace_n, r.sumspace_bits, r.sumspace_log10_max_coeff, r.sumspace_double_error, r.jfp_n,
        r.jfp_max_coeff, r.jfp_error);
  log("bench-sumspace done ({:.2f}s)", seconds_since(t0));
  if (common.format == "json") {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"lambda", r.lambda},
                     {"sumspace_n", r.sumspace_n},
                     {"sumspace_bits", r.sumspace_bits},
                     {"sumspace_log10_max_coeff", json_num(r.sumspace_log10_max_coeff)},
                     {"sumspace_double_error", json_num(r.sumspace_double_error)},
                     {"sumspace_log10_condition", json_num(r.sumspace_log10_condition)},
                     {"sumspace_truncation", r.sumspace_truncation},
                     {"jfp_n", r.jfp_n},
                     {"jfp_max_coeff", r.jfp_max_coeff},
                     {"jfp_error", r.jfp_error},
                     {"jfp_condition", json_num(r.jfp_condition)},
                     {"jfp_truncation", r.jfp_truncation}});
    json j;
    j["format"] = "jfp sumspace comparison v1";
    j["rows"] = arr;
    emit(j.dump(1) + "\n");
  } else {
    emit(comparison_csv(rows));
  }
  return 0;
}

// ---------------------------------------------------------------- convergence

struct ConvergenceArgs {
  std::string example = "ex1";
  std::string sizes = "10,20,30,40,50,60";
  std::string mu = "1/2";
  std::string lambda = "1";
  std::string problems_dir = JFP_PROBLEMS_DIR;
};

int run_convergence(const ConvergenceArgs& a) {
  auto t0 = Clock::now();
  std::filesystem::path dir(a.problems_dir);
  FIEProblem problem;
  BasisOverrides o;
  if (a.example == "ex1") {
    problem = mittag_leffler_problem(param(a.mu), a.lambda);
  } else if (a.example == "ex2") {
    problem = load_problem(dir / "mittag2.json");
  } else if (a.example == "ex3") {
    problem = load_problem(dir / "example3.json");
    problem.set_parameter("lambda", a.lambda);
  } else if (a.example == "multi-order" || a.example == "varcoeff" || a.example == "bagley-torvik-caputo" ||
             a.example == "bagley-torvik-rl") {
    problem = load_problem(dir / (a.example + ".json"));
  } else {
    throw ConfigError("unknown example '" + a.example +
                      "' (ex1, ex2, ex3, multi-order, varcoeff, bagley-torvik-caputo, bagley-torvik-rl)");
  }
  BasisSelection basis = select_basis(problem, o);
  SolveOptions so;
  so.delta = common.delta;
  std::vector<std::size_t> sizes = parse_sizes(a.sizes);
  bool has_exact = problem.exact.kind != ExactSolution::Kind::none;
  auto run = [&](std::size_t n) {
    return problem.bordered() ? solve_bordered(problem, basis, n, so) : solve(problem, basis, n, so);
  };
  std::optional<SolutionFunction> reference;
  std::size_t ref_n = 0;
  if (!has_exact) {
    for (std::size_t n : sizes) ref_n = std::max(ref_n, n);
    ref_n *= 2;
    reference = run(ref_n);
  }
  std::string measure = has_exact ? "max_error" : fmt::format("difference_to_N{}", ref_n);
  std::string out =
      fmt::format("# jfp convergence v1\n# example={},alpha={},beta={},b={},p={},k_star={}\nN,{},residual,tail\n",
                  a.example, basis.params.jacobi.alpha.str(), basis.params.jacobi.beta.str(), basis.params.b.str(),
                  basis.params.p.str(), basis.k_star, measure);
  json rows = json::array();
  for (std::size_t n : sizes) {
    SolutionFunction s = run(n);
    double e = has_exact ? max_error(s, problem) : max_difference(s, *reference);
    out += fmt::format("{},{},{},{}\n", n, num(e), num(s.residual), num(s.tail));
    rows.push_back({{"N", n}, {measure, e}, {"residual", s.residual}, {"tail", s.tail}});
    log("{} N={} {}={:.3e}", a.example, n, measure, e);
  }
  log("convergence done ({:.2f}s)", seconds_since(t0));
  if (common.format == "json") {
    json j;
    j["format"] = "jfp convergence v1";
    j["example"] = a.example;
    j["measure"] = measure;
    j["rows"] = rows;
    emit(j.dump(1) + "\n");
  } else {
    emit(out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jacobi fractional polynomial solver for fractional integral equations"};
  app.require_subcommand(1);

  FracmatArgs fa;
  CLI::App* fracmat = app.add_subcommand("fracmat", "Build a fractional integration matrix I^{(alpha,beta)}_{b,p,mu}");
  fracmat->add_option("--alpha", fa.alpha, "Jacobi alpha")->capture_default_str();
  fracmat->add_option("--beta", fa.beta, "Jacobi beta")->capture_default_str();
  fracmat->add_option("--b", fa.b, "Weight exponent b")->capture_default_str();
  fracmat->add_option("--p", fa.p, "Power p (default 1/mu)");
  fracmat->add_option("--mu", fa.mu, "Integration order")->capture_default_str();
  fracmat->add_option("-N,--N", fa.n, "Number of columns")->capture_default_str()->check(CLI::PositiveNumber);
  fracmat->add_option("--cache", fa.cache, "Matrix cache directory");
  fracmat->add_flag("--verify", fa.verify, "Compare against a rebuild at twice the precision");
  add_common(fracmat, true);

  SolveArgs sa;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve an FIE problem file");
  solve_cmd->set_help_flag("--help", "Print this help message and exit");
  solve_cmd->add_option("problem", sa.file, "Problem file (JSON)")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("-N,--N", sa.n, "Truncation size or 'auto'")->capture_default_str();
  solve_cmd->add_option("--param", sa.params, "Override a problem parameter, name=value");
  solve_cmd->add_option("--k-star", sa.k_star, "Bandwidth k* (p = k*/base order)");
  solve_cmd->add_option("--alpha", sa.alpha, "Jacobi alpha");
  solve_cmd->add_option("--beta", sa.beta, "Jacobi beta");
  solve_cmd->add_option("--b", sa.b, "Weight exponent b");
  solve_cmd->add_option("--p", sa.p, "Power p");
  solve_cmd->add_option("--h", sa.h, "Output grid spacing")->capture_default_str()->check(CLI::Range(1e-6, 2.0));
  solve_cmd->add_option("--n-max", sa.n_max, "Largest N tried by automatic truncation")->capture_default_str();
  solve_cmd->add_flag("--coefficients", sa.coefficients, "Emit coefficients instead of grid values (CSV)");
  add_common(solve_cmd, true);

  MLArgs ma;
  CLI::App* ml = app.add_subcommand("ml", "Mittag-Leffler values or closed-form FIE solutions");
  ml->set_help_flag("--help", "Print this help message and exit");
  ml->add_option("--mu", ma.mu, "First parameter")->capture_default_str();
  ml->add_option("--nu", ma.nu, "Second parameter")->capture_default_str();
  ml->add_option("--lambda", ma.lambda, "FIE coefficient for the solution table")->capture_default_str();
  ml->add_option("--z", ma.z, "Comma-separated arguments z: emit E_{mu,nu}(z) instead");
  ml->add_option("--h", ma.h, "Grid spacing")->capture_default_str()->check(CLI::Range(1e-6, 2.0));
  add_common(ml);

  HeatArgs ha;
  CLI::App* heat = app.add_subcommand("heatwave", "Time-fractional heat/wave equation with periodic initial data");
  heat->add_option("--mu", ha.mu, "Order in (0, 2]")->required();
  heat->add_option("--T", ha.T, "Final time")->capture_default_str()->check(CLI::PositiveNumber);
  heat->add_option("--ic", ha.ic, "Initial data as an expression in x")->capture_default_str();
  heat->add_option("--grid", ha.grid, "FFT sample count (power of two)")->capture_default_str();
  heat->add_option("--tol", ha.tol, "Relative Fourier truncation tolerance")->capture_default_str();
  heat->add_option("--p", ha.p, "Preferred power p")->capture_default_str();
  heat->add_option("--nx", ha.nx, "Points in x on [0, 2 pi]")->capture_default_str()->check(CLI::PositiveNumber);
  heat->add_option("--nt", ha.nt, "Points in t on [0, T]")->capture_default_str()->check(CLI::PositiveNumber);
  heat->add_option("-N,--N", ha.n, "Fixed master truncation (0: automatic)")->capture_default_str();
  heat->add_option("--n-max", ha.n_max, "Largest automatic master truncation")->capture_default_str();
  heat->add_option("--metadata", ha.metadata, "JSON metadata path (default: <output>.json)");
  add_common(heat);

  BenchArgs ba;
  CLI::App* bench = app.add_subcommand("bench-sumspace", "Sum-space vs JFP comparison for u + lambda^2 I^{1/2} u = 1");
  bench->add_option("--lambdas", ba.lambdas, "Comma-separated lambda values")->capture_default_str();
  bench->add_option("-N,--N", ba.n, "Sum-space truncation, even (0: automatic)")->capture_default_str();
  bench->add_option("--jfp-N", ba.jfp_n, "JFP truncation (0: automatic)")->capture_default_str();
  bench->add_option("--target", ba.target, "Accuracy defining truncation sizes")->capture_default_str();
  bench->add_option("--max-bits", ba.max_bits, "Skip high-precision sum-space runs above this precision")
      ->capture_default_str();
  bench->add_flag("--no-conditions", ba.no_conditions, "Skip condition number estimates");
  add_common(bench);

  ConvergenceArgs ca;
  CLI::App* conv = app.add_subcommand("convergence", "Error-vs-N tables for the worked examples");
  conv->add_option("--example", ca.example,
                   "ex1, ex2, ex3, multi-order, varcoeff, bagley-torvik-caputo or bagley-torvik-rl")
      ->capture_default_str();
  conv->add_option("--Ns", ca.sizes, "Comma-separated truncation sizes")->capture_default_str();
  conv->add_option("--mu", ca.mu, "Order for ex1")->capture_default_str();
  conv->add_option("--lambda", ca.lambda, "Coefficient for ex1 and ex3")->capture_default_str();
  conv->add_option("--problems", ca.problems_dir, "Directory with the example problem files")->capture_default_str();
  add_common(conv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*fracmat) return run_fracmat(fa);
    if (*solve_cmd) return run_solve(sa);
    if (*ml) return run_ml(ma);
    if (*heat) return run_heatwave(ha);
    if (*bench) return run_bench(ba);
    if (*conv) return run_convergence(ca);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const ConvergenceError& e) {
    fmt::print(stderr, "error: no convergence: {}\n", e.what());
    return 2;
  } catch (const InternalError& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return 3;
  }
  return 3;
}
