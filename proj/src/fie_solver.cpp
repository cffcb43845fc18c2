#include "jfp/fie_solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "jfp/errors.hpp"
#include "jfp/mittag_leffler.hpp"
#include "jfp/quadrature.hpp"

namespace jfp {

namespace {

Rational rational_gcd(const Rational& a, const Rational& b) {
  std::int64_t n = std::gcd(a.numerator() * b.denominator(), b.numerator() * a.denominator());
  return Rational(n, a.denominator() * b.denominator());
}

std::vector<Param> all_orders(const FIEProblem& problem) {
  std::vector<Param> out = problem.orders();
  if (problem.reconstruct && !problem.reconstruct->order.is_zero()) out.push_back(problem.reconstruct->order);
  return out;
}

Param base_order_of(const std::vector<Param>& orders) {
  if (orders.empty()) return Param(1);
  Rational g(1);
  for (std::size_t k = 1; k < orders.size(); ++k) {
    Param ratio = orders[k] / orders[0];
    if (!ratio.is_rational())
      throw ConfigError("order " + orders[k].str() + " is not a rational multiple of " + orders[0].str());
    g = rational_gcd(g, ratio.rational());
  }
  return orders[0] * Param(g);
}

Param abs_param(const Param& v) { return v.sign() < 0 ? -v : v; }

std::string join(const std::vector<Param>& v) {
  std::string s;
  for (const auto& b : v) s += (s.empty() ? "" : ", ") + b.str();
  return s.empty() ? "none" : s;
}

Real max_abs(const std::vector<Real>& c) {
  Real m(0);
  for (const auto& v : c) m = mp::max(m, mp::abs(v));
  return m;
}

/// out = B * D for banded B and dense D.
RealMatrix banded_times_dense(const RealBanded& b, const RealMatrix& d) {
  if (b.cols() != d.rows()) throw InternalError("banded x dense: shape mismatch");
  RealMatrix out(b.rows(), d.cols());
  for (std::size_t j = 0; j < d.cols(); ++j)
    for (std::size_t l = 0; l < d.rows(); ++l) {
      const Real& dl = d(l, j);
      if (dl.is_zero()) continue;
      for (std::size_t i = b.col_begin(l); i < b.col_end(l); ++i) {
        const Real& bil = b.at(i, l);
        if (!bil.is_zero()) out(i, j).fma_add(bil, dl);
      }
    }
  return out;
}

/// out = D * B for dense D and banded B.
RealMatrix dense_times_banded(const RealMatrix& d, const RealBanded& b) {
  if (d.cols() != b.rows()) throw InternalError("dense x banded: shape mismatch");
  RealMatrix out(d.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t l = b.col_begin(j); l < b.col_end(j); ++l) {
      const Real& blj = b.at(l, j);
      if (blj.is_zero()) continue;
      for (std::size_t i = 0; i < d.rows(); ++i) {
        const Real& dil = d(i, l);
        if (!dil.is_zero()) out(i, j).fma_add(dil, blj);
      }
    }
  return out;
}

/// Scalar or banded multiplication operator.
struct Coefficient {
  bool scalar = true;
  Real value{1};
  RealBanded matrix;
  long degree = 0;
};

class OperatorBuilder {
 public:
  OperatorBuilder(const FIEProblem& problem, const BasisSelection& basis, std::size_t size, const SolveOptions& opts)
      : problem_(problem), basis_(basis), size_(size), opts_(opts), ctx_(opts.build_bits) {
    auto g = ctx_.activate();
    env_ = problem.environment();
  }

  const Environment& env() const { return env_; }
  const PrecisionContext& ctx() const { return ctx_; }
  double frac_error() const { return frac_error_; }
  long frac_precision() const { return frac_precision_; }

  Coefficient coefficient(const Expression& e) {
    auto g = ctx_.activate();
    Coefficient c;
    if (!e.depends_on("x")) {
      c.value = e.eval(env_);
      return c;
    }
    auto key = e.text();
    auto it = mult_cache_.find(key);
    if (it == mult_cache_.end()) {
      Environment env = env_;
      auto f = [e, env](const Real& x) { return e.eval(x, env); };
      RealBanded m = mult_matrix_fn(f, basis_, size_, opts_.coefficient_tol, ctx_);
      it = mult_cache_.emplace(key, std::move(m)).first;
    }
    c.scalar = false;
    c.matrix = it->second;
    c.degree = it->second.lower();
    return c;
  }

  /// size x size section of I^mu.
  const RealMatrix& integral(const Param& mu) {
    std::string key = mu.str();
    if (auto it = int_cache_.find(key); it != int_cache_.end()) return it->second;
    RealMatrix m = build_integral(mu);
    return int_cache_.emplace(key, std::move(m)).first->second;
  }

 private:
  RealMatrix build_integral(const Param& mu) {
    if (mu.is_zero()) {
      auto g = ctx_.activate();
      return RealMatrix::identity(size_);
    }
    if (mu.is_rational()) {
      std::int64_t whole = floor(mu.rational());
      Param frac = mu - Param(whole);
      if (frac.is_zero()) return integer_power(whole).to_dense();
      bool split = whole >= 1 && int_matrix_admissible(basis_.params) && (frac * basis_.params.p).is_integer();
      if (split) {
        const RealMatrix& f = integral(frac);
        RealBanded ik = integer_power(whole);
        auto g = ctx_.activate();
        return banded_times_dense(ik, f);
      }
    }
    return fractional(mu);
  }

  RealMatrix fractional(const Param& mu) {
    FracIntMatrix m = pseudo_stabilized(basis_.params, mu, size_, opts_.delta);
    frac_error_ = std::max(frac_error_, m.error_estimate);
    frac_precision_ = std::max(frac_precision_, m.precision);
    auto g = ctx_.activate();
    RealMatrix out(size_, size_);
    for (std::size_t j = 0; j < size_; ++j)
      for (std::size_t i = 0; i < size_ && i < m.columns[j].size(); ++i) {
        out(i, j) = Real(0);
        out(i, j) += m.columns[j][i];
      }
    return out;
  }

  RealBanded integer_power(std::int64_t k) {
    if (auto it = pow_cache_.find(k); it != pow_cache_.end()) return it->second;
    RealBanded out;
    if (!int_matrix_admissible(basis_.params)) {
      RealMatrix d = fractional(Param(k));
      long lower = k * basis_.params.p.to_integer();
      out = RealBanded(size_, size_, lower, static_cast<long>(size_));
      auto g = ctx_.activate();
      for (std::size_t j = 0; j < size_; ++j)
        for (std::size_t i = out.col_begin(j); i < out.col_end(j); ++i) out.at(i, j) = d(i, j);
    } else if (k == 1) {
      out = int_matrix(basis_.params, size_, ctx_);
    } else {
      RealBanded one = integer_power(1);
      RealBanded rest = integer_power(k - 1);
      auto g = ctx_.activate();
      out = one * rest;
    }
    pow_cache_.emplace(k, out);
    return out;
  }

  const FIEProblem& problem_;
  const BasisSelection& basis_;
  std::size_t size_;
  SolveOptions opts_;
  PrecisionContext ctx_;
  Environment env_;
  std::map<std::string, RealMatrix> int_cache_;
  std::map<std::int64_t, RealBanded> pow_cache_;
  std::map<std::string, RealBanded> mult_cache_;
  double frac_error_ = 0;
  long frac_precision_ = 0;
};

/// Margin of extra columns so the leading n x n block of every product is exact.
std::size_t build_margin(const FIEProblem& problem, const BasisSelection& basis, std::size_t coeff_degree_guess) {
  double p = basis.params.p.to_double();
  double top = 0;
  for (const auto& o : all_orders(problem)) top = std::max(top, o.to_double());
  long integer_band = static_cast<long>(std::ceil((std::floor(top) + 1) * p));
  return static_cast<std::size_t>(2 * integer_band + basis.k_star + 2 * coeff_degree_guess + 8);
}

std::size_t degree_guess(const FIEProblem& problem) {
  bool variable = false;
  for (const auto& t : problem.terms) variable = variable || t.outer.depends_on("x") || t.inner.depends_on("x");
  return variable ? 40 : 0;
}

RealMatrix add_term(OperatorBuilder& builder, const FIETerm& term, std::size_t size, std::vector<long>& degrees) {
  Coefficient a = builder.coefficient(term.outer);
  Coefficient b = builder.coefficient(term.inner);
  const RealMatrix& integral = builder.integral(term.order);
  auto g = builder.ctx().activate();
  RealMatrix t = integral;
  if (!b.scalar) t = dense_times_banded(t, b.matrix);
  if (!a.scalar) t = banded_times_dense(a.matrix, t);
  Real s = a.value * b.value;
  if (s != Real(1)) t *= s;
  degrees.push_back(std::max(a.degree, b.degree));
  (void)size;
  return t;
}

std::pair<long, long> section_bandwidths(const RealMatrix& m, bool fractional) {
  auto [lo, up] = m.bandwidths();
  if (fractional) up = -1;
  return {lo, up};
}

bool has_fractional(const FIEProblem& problem) {
  for (const auto& t : problem.terms)
    if (!t.order.is_integer()) return true;
  return false;
}

Eigen::MatrixXd to_eigen(const Dense<double>& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
  return m;
}

void finish_diagnostics(SolutionFunction& sol, double tail_tol) {
  double scale = 0, tail = 0;
  std::size_t n = sol.coeffs.size();
  std::size_t start = n - std::max<std::size_t>(1, n / 10);
  for (std::size_t k = 0; k < n; ++k) {
    double a = std::abs(sol.coeffs[k]);
    scale = std::max(scale, a);
    if (k >= start) tail = std::max(tail, a);
  }
  sol.tail = tail;
  sol.residual_estimate = std::max(sol.residual, tail);
  sol.converged = n > 0 && std::isfinite(scale) && tail <= tail_tol * std::max(1.0, scale);
}

Eigen::VectorXd lu_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& f) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  double rc = lu.rcond();
  if (!(rc > 1e-300)) throw ConvergenceError("truncated system is singular");
  Eigen::VectorXd u = lu.solve(f);
  if (!u.allFinite()) throw ConvergenceError("truncated system is singular");
  return u;
}

double jfp_value(const JFPParams& params, const std::vector<double>& c, double x) {
  if (c.empty()) return 0;
  return jfp_sum(params, c, x);
}

}  // namespace

BasisSelection select_basis(const FIEProblem& problem, const BasisOverrides& overrides) {
  BasisSelection sel;
  Param alpha = overrides.alpha ? *overrides.alpha : problem.basis.alpha.value_or(Param(0));
  Param beta = overrides.beta ? *overrides.beta : problem.basis.beta.value_or(Param(0));
  std::optional<long> k_opt = overrides.k_star ? overrides.k_star : problem.basis.k_star;
  std::optional<Param> p_opt = overrides.p ? overrides.p : problem.basis.p;
  std::optional<Param> b_opt = overrides.b ? overrides.b : problem.basis.b;

  std::vector<Param> orders = all_orders(problem);
  sel.base_order = base_order_of(orders);
  Param p;
  if (p_opt) {
    p = *p_opt;
    if (!(Param(0) < p)) throw DomainError("power p must be positive, got " + p.str());
    for (const auto& o : orders)
      if (!(o * p).is_integer())
        throw DomainError("p = " + p.str() + " is incompatible with order " + o.str() + ": mu p must be an integer");
    Param k = sel.base_order * p;
    sel.k_star = k.is_integer() ? k.to_integer() : 1;
    if (k_opt && k.is_integer() && *k_opt != sel.k_star)
      throw DomainError("k_star = " + std::to_string(*k_opt) + " contradicts p = " + p.str());
  } else {
    sel.k_star = k_opt.value_or(1);
    if (sel.k_star < 1) throw DomainError("k_star must be a positive integer");
    p = Param(sel.k_star) / sel.base_order;
  }

  Param w = problem.leading_weight();
  Param pw = p * w;
  std::vector<Param> cands;
  for (long n = 0; n < 100000; ++n) {
    Param b;
    try {
      b = pw - Param(n);
    } catch (const ConfigError&) {
      break;
    }
    if (!(-p < b)) break;
    cands.push_back(b);
  }
  sel.permissible_b = cands;
  if (cands.empty())
    throw DomainError("no admissible b: solution weight (1+x)^" + w.str() + " needs b = " + pw.str() +
                      " - n with b > -p = " + (-p).str());

  auto make = [&](const Param& b) { return JFPParams::checked(alpha, beta, b, p); };
  std::size_t pick = 0;
  if (b_opt) {
    auto it = std::find(cands.begin(), cands.end(), *b_opt);
    if (it == cands.end())
      throw DomainError("b = " + b_opt->str() + " is not admissible for solution weight (1+x)^" + w.str() +
                        " with p = " + p.str() + "; permissible values: " + join(cands));
    pick = static_cast<std::size_t>(it - cands.begin());
  } else {
    auto better = [&](std::size_t i, std::size_t j) {
      bool fi = int_matrix_admissible(make(cands[i])), fj = int_matrix_admissible(make(cands[j]));
      if (fi != fj) return fi;
      Param ai = abs_param(cands[i]), aj = abs_param(cands[j]);
      if (ai != aj) return ai < aj;
      return cands[j] < cands[i];
    };
    for (std::size_t i = 1; i < cands.size(); ++i)
      if (better(i, pick)) pick = i;
  }
  sel.params = make(cands[pick]);
  sel.n = static_cast<long>(pick);
  sel.recurrence_available = int_matrix_admissible(sel.params);
  return sel;
}

std::vector<Real> jacobi_expand(const std::function<Real(const Real&)>& f, const Param& alpha, const Param& beta,
                                double tol, const PrecisionContext& ctx, std::size_t max_degree) {
  auto g = ctx.activate();
  Real a = alpha.to_real(), b = beta.to_real();
  for (std::size_t m = 16;; m *= 2) {
    GaussRule rule = gauss_jacobi(a, b, 2 * m, ctx);
    std::vector<Real> values;
    values.reserve(rule.nodes.size());
    for (const auto& y : rule.nodes) values.push_back(f(y));
    std::vector<Real> c = jacobi_coefficients(a, b, rule, values, m);
    Real scale = max_abs(c);
    if (scale.is_zero()) return {Real(0)};
    Real tail(0);
    for (std::size_t k = m - std::max<std::size_t>(2, m / 8); k < m; ++k) tail = mp::max(tail, mp::abs(c[k]));
    Real cut = scale * Real(tol);
    if (tail <= cut) {
      while (c.size() > 1 && mp::abs(c.back()) <= cut) c.pop_back();
      return c;
    }
    if (m >= max_degree)
      throw ConvergenceError("expansion coefficients do not decay below " + std::to_string(tol) + " by degree " +
                             std::to_string(m));
  }
}

std::vector<Real> expand_parts(const std::vector<WeightedPart>& parts, const Environment& env,
                               const BasisSelection& basis, std::size_t n, const PrecisionContext& ctx, double tol) {
  auto g = ctx.activate();
  std::vector<Real> total(n, Real(0));
  const JFPParams& prm = basis.params;
  Real p = prm.p.to_real();
  for (const auto& part : parts) {
    Param e;
    try {
      e = prm.p * part.weight - prm.b;
    } catch (const ConfigError&) {
      e = Param(1, 2);
    }
    if (!e.is_integer() || e.to_integer() < 0)
      throw DomainError("(1+x)^" + part.weight.str() + " is not representable in the basis with b = " + prm.b.str() +
                        ", p = " + prm.p.str() + ": p w - b must be a non-negative integer");
    long ei = e.to_integer();
    Real factor = mp::pow(Real(2), part.weight.to_real() * (1 - p));
    Expression expr = part.expr;
    auto fy = [&](const Real& y) {
      Real x = map_to_x(y, p);
      Real v = expr.eval(x, env) * factor;
      if (ei > 0) v *= mp::pow(y + 1, Real(ei));
      return v;
    };
    std::vector<Real> c = jacobi_expand(fy, prm.jacobi.alpha, prm.jacobi.beta, tol, ctx);
    for (std::size_t k = 0; k < n && k < c.size(); ++k) total[k] += c[k];
  }
  return total;
}

std::vector<Real> expand_rhs(const FIEProblem& problem, const BasisSelection& basis, std::size_t n,
                             const PrecisionContext& ctx, double tol) {
  auto g = ctx.activate();
  Environment env = problem.environment();
  std::vector<Real> c = expand_parts(problem.rhs, env, basis, n, ctx, tol);
  if (problem.rhs_samples) {
    const RhsSamples& s = *problem.rhs_samples;
    const JFPParams& prm = basis.params;
    Param e;
    try {
      e = prm.p * s.weight - prm.b;
    } catch (const ConfigError&) {
      e = Param(1, 2);
    }
    if (!e.is_integer() || e.to_integer() < 0)
      throw DomainError("sample weight (1+x)^" + s.weight.str() + " is not representable in the basis");
    // least squares fit of f (1+y)^{-b} in y, degree <= samples / 2
    std::size_t deg = std::min(n, std::max<std::size_t>(1, s.x.size() / 2));
    double pd = prm.p.to_double(), bd = prm.b.to_double();
    double alpha = prm.jacobi.alpha.to_double(), beta = prm.jacobi.beta.to_double();
    Eigen::MatrixXd v(static_cast<Eigen::Index>(s.x.size()), static_cast<Eigen::Index>(deg));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(s.x.size()));
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double x = s.x[i];
      if (x <= -1 && bd != 0) throw DomainError("rhs samples must avoid x = -1 when b != 0");
      double y = pd == 1 ? x : 2 * std::pow((x + 1) / 2, 1 / pd) - 1;
      rhs(static_cast<Eigen::Index>(i)) = bd == 0 ? s.values[i] : s.values[i] * std::pow(y + 1, -bd);
      for (std::size_t k = 0; k < deg; ++k) {
        std::vector<double> unit(k + 1, 0.0);
        unit[k] = 1;
        v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = jacobi_clenshaw(alpha, beta, unit, y);
      }
    }
    Eigen::VectorXd fit = v.colPivHouseholderQr().solve(rhs);
    for (std::size_t k = 0; k < deg; ++k) c[k] += Real(fit(static_cast<Eigen::Index>(k)));
  }
  return c;
}

RealBanded mult_matrix_poly(const std::vector<Real>& c, const JacobiParams& jp, std::size_t n,
                            const PrecisionContext& ctx) {
  long m = c.empty() ? 0 : static_cast<long>(c.size()) - 1;
  std::size_t big = n + static_cast<std::size_t>(m) + 1;
  RealBanded jm = jacobi_operator(jp, big, ctx);
  auto g = ctx.activate();
  Real a = jp.alpha.to_real(), b = jp.beta.to_real();
  RealBanded id = RealBanded::identity(big);
  RealBanded b1(big, big, 0, 0), b2(big, big, 0, 0);
  for (long k = m; k >= 0; --k) {
    RecurrenceCoeffs r = recurrence(a, b, k);
    RealBanded step = jm * b1;
    step *= r.a;
    RealBanded shift = b1;
    shift *= r.b;
    RealBanded ck = id;
    ck *= c.empty() ? Real(0) : c[static_cast<std::size_t>(k)];
    RealBanded bk = ck + step + shift;
    if (k + 1 <= m) {
      RealBanded back = b2;
      back *= recurrence(a, b, k + 1).c;
      bk = bk - back;
    }
    b2 = std::move(b1);
    b1 = std::move(bk);
  }
  RealBanded out(n, n, m, m);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = out.col_begin(j); i < out.col_end(j); ++i) out.at(i, j) = b1.get(i, j);
  return out;
}

RealBanded mult_matrix_fn(const std::function<Real(const Real&)>& f, const BasisSelection& basis, std::size_t n,
                          double tol, const PrecisionContext& ctx, std::size_t max_degree) {
  auto g = ctx.activate();
  Real p = basis.params.p.to_real();
  auto fy = [&](const Real& y) { return f(map_to_x(y, p)); };
  std::vector<Real> c = jacobi_expand(fy, basis.params.jacobi.alpha, basis.params.jacobi.beta, tol, ctx, max_degree);
  if (c.size() > max_degree + 1)
    throw ConvergenceError("coefficient degree " + std::to_string(c.size() - 1) + " exceeds the cap " +
                           std::to_string(max_degree));
  return mult_matrix_poly(c, basis.params.jacobi, n, ctx);
}

AssembledOperator assemble(const FIEProblem& problem, const BasisSelection& basis, std::size_t n,
                           const SolveOptions& opts) {
  std::size_t size = n + build_margin(problem, basis, degree_guess(problem));
  OperatorBuilder builder(problem, basis, size, opts);
  AssembledOperator out;
  out.build_size = size;
  RealMatrix total;
  for (const auto& term : problem.terms) {
    RealMatrix t = add_term(builder, term, size, out.coefficient_degrees);
    auto g = builder.ctx().activate();
    if (total.rows() == 0)
      total = std::move(t);
    else
      total += t;
  }
  auto g = builder.ctx().activate();
  out.section = total.block(n, n);
  auto [lo, up] = section_bandwidths(out.section, has_fractional(problem));
  out.lower_bandwidth = lo;
  out.upper_bandwidth = up;
  out.frac_error = builder.frac_error();
  out.frac_precision = builder.frac_precision();
  return out;
}

SolutionFunction solve(const FIEProblem& problem, const BasisSelection& basis, std::size_t n,
                       const SolveOptions& opts) {
  if (problem.bordered()) return solve_bordered(problem, basis, n, opts);
  if (n == 0) throw ConfigError("truncation size must be positive");
  AssembledOperator op = assemble(problem, basis, n, opts);
  PrecisionContext ctx(opts.build_bits);
  std::vector<Real> f = expand_rhs(problem, basis, n, ctx, opts.expansion_tol);
  Eigen::MatrixXd a = to_eigen(op.section.to_double_matrix());
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) rhs(static_cast<Eigen::Index>(k)) = f[k].to_double();
  Eigen::VectorXd u = lu_solve(a, rhs);
  SolutionFunction sol;
  sol.basis = basis.params;
  sol.N = n;
  sol.coeffs.assign(u.data(), u.data() + u.size());
  sol.reconstructed_coeffs = sol.coeffs;
  sol.residual = (a * u - rhs).lpNorm<Eigen::Infinity>();
  sol.frac_error = op.frac_error;
  sol.frac_precision = op.frac_precision;
  {
    auto g = ctx.activate();
    sol.env = problem.environment();
  }
  finish_diagnostics(sol, opts.tail_tol);
  return sol;
}

SolutionFunction solve_auto(const FIEProblem& problem, const BasisSelection& basis, const SolveOptions& opts) {
  for (std::size_t n = std::max<std::size_t>(opts.n_start, 2); n <= opts.n_max; n *= 2) {
    SolutionFunction sol = solve(problem, basis, n, opts);
    if (sol.converged) return sol;
  }
  throw ConvergenceError("solution coefficients did not decay below the tail tolerance by N = " +
                         std::to_string(opts.n_max));
}

SolutionFunction solve_bordered(const FIEProblem& problem, const BasisSelection& basis, std::size_t n,
                                const SolveOptions& opts) {
  std::size_t kc = problem.constants.size();
  if (problem.conditions.size() != kc)
    throw ConfigError("bordered problem needs one condition per constant");
  PrecisionContext ctx(opts.build_bits);
  auto g = ctx.activate();
  Environment env = problem.environment();
  Param r = problem.reconstruct ? problem.reconstruct->order : Param(0);
  Expression extra = problem.reconstruct ? problem.reconstruct->extra : Expression::parse("0");

  std::size_t dim = kc + n;
  if (dim == 0) throw ConfigError("bordered system is empty");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  SolutionFunction sol;
  sol.basis = basis.params;
  sol.N = n;
  sol.env = env;
  sol.extra = extra;
  sol.vanishes_at_left = r.sign() > 0;
  for (const auto& c : problem.constants) {
    sol.constant_names.push_back(c.name);
    sol.constant_shapes.push_back(c.reconstruct);
  }

  RealMatrix recon;  // rows x n section of I^r
  if (n > 0) {
    AssembledOperator op = assemble(problem, basis, n, opts);
    sol.frac_error = op.frac_error;
    sol.frac_precision = op.frac_precision;
    auto g2 = ctx.activate();
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        a(static_cast<Eigen::Index>(kc + i), static_cast<Eigen::Index>(kc + j)) = op.section(i, j).to_double();
    std::vector<Real> f = expand_rhs(problem, basis, n, ctx, opts.expansion_tol);
    for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(kc + i)) = f[i].to_double();
    for (std::size_t k = 0; k < kc; ++k) {
      std::vector<Real> col = expand_parts(problem.constants[k].column, env, basis, n, ctx, opts.expansion_tol);
      for (std::size_t i = 0; i < n; ++i)
        a(static_cast<Eigen::Index>(kc + i), static_cast<Eigen::Index>(k)) = col[i].to_double();
    }
    // section of I^r with every row that I^r v can reach
    std::size_t size = n + build_margin(problem, basis, degree_guess(problem));
    OperatorBuilder builder(problem, basis, size, opts);
    long reach = static_cast<long>(std::ceil(r.to_double() * basis.params.p.to_double())) + 1;
    std::size_t rows = std::min(size, n + static_cast<std::size_t>(std::max(0L, reach)));
    recon = builder.integral(r).block(rows, n);
  }

  for (std::size_t k = 0; k < kc; ++k) {
    const PointCondition& cond = problem.conditions[k];
    Real at = cond.at.eval(env);
    Real value = cond.value.eval(env) - extra.eval(at, env);
    rhs(static_cast<Eigen::Index>(k)) = value.to_double();
    for (std::size_t i = 0; i < kc; ++i)
      a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          problem.constants[i].reconstruct.eval(at, env).to_double();
    if (n > 0) {
      std::vector<Real> q;
      for (std::size_t i = 0; i < recon.rows(); ++i) q.push_back(jfp_eval(basis.params, static_cast<long>(i), at, ctx));
      for (std::size_t j = 0; j < n; ++j) {
        Real s(0);
        for (std::size_t i = 0; i < recon.rows(); ++i)
          if (!recon(i, j).is_zero()) s.fma_add(q[i], recon(i, j));
        a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(kc + j)) = s.to_double();
      }
    }
  }

  Eigen::VectorXd u;
  try {
    u = lu_solve(a, rhs);
  } catch (const ConvergenceError&) {
    throw ConvergenceError("bordered system is rank deficient");
  }
  sol.residual = (a * u - rhs).lpNorm<Eigen::Infinity>();
  for (std::size_t k = 0; k < kc; ++k) sol.constants.push_back(u(static_cast<Eigen::Index>(k)));
  for (std::size_t j = 0; j < n; ++j) sol.coeffs.push_back(u(static_cast<Eigen::Index>(kc + j)));
  if (n > 0) {
    sol.reconstructed_coeffs.assign(recon.rows(), 0.0);
    for (std::size_t i = 0; i < recon.rows(); ++i) {
      Real s(0);
      for (std::size_t j = 0; j < n; ++j)
        if (!recon(i, j).is_zero()) s.fma_add(recon(i, j), Real(sol.coeffs[j]));
      sol.reconstructed_coeffs[i] = s.to_double();
    }
    finish_diagnostics(sol, opts.tail_tol);
  } else {
    sol.residual_estimate = sol.residual;
    sol.converged = true;
  }
  return sol;
}

double evaluate(const SolutionFunction& sol, double x) { return jfp_value(sol.basis, sol.coeffs, x); }

double solution_value(const SolutionFunction& sol, double x) {
  double v = x <= -1 && sol.vanishes_at_left ? 0.0 : jfp_value(sol.basis, sol.reconstructed_coeffs, x);
  if (sol.constants.empty() && sol.extra.text() == "0") return v;
  mp::ScopedPrecision g(64);
  Real xr(x);
  Real s = sol.extra.eval(xr, sol.env);
  for (std::size_t k = 0; k < sol.constants.size(); ++k)
    s += Real(sol.constants[k]) * sol.constant_shapes[k].eval(xr, sol.env);
  return v + s.to_double();
}

double solution_value_offset(const SolutionFunction& sol, double opx) {
  if (!sol.constants.empty() || sol.extra.text() != "0" || sol.reconstructed_coeffs.empty())
    return solution_value(sol, opx - 1);
  return jfp_sum_offset(sol.basis, sol.reconstructed_coeffs, opx);
}

double condition_estimate(const Dense<double>& section) { return condition_number(section); }

double condition_estimate(const AssembledOperator& op) {
  return condition_number(op.section.to_double_matrix());
}

std::optional<double> exact_value(const FIEProblem& problem, double x) {
  const ExactSolution& e = problem.exact;
  if (e.kind == ExactSolution::Kind::none) return std::nullopt;
  mp::ScopedPrecision g(96);
  Environment env = problem.environment();
  if (e.kind == ExactSolution::Kind::expression) return e.expr.eval(Real(x), env).to_double();
  Real lambda = e.lambda.eval(env);
  Real scale = e.scale.eval(env);
  return (scale * ml_solution(e.mu, e.nu, lambda, Real(x), 1e-18)).to_double();
}

std::vector<double> grid(double h, bool include_left) {
  std::vector<double> out;
  long steps = std::lround(2.0 / h);
  for (long k = include_left ? 0 : 1; k <= steps; ++k) out.push_back(-1.0 + 2.0 * static_cast<double>(k) / steps);
  return out;
}

double max_error(const SolutionFunction& sol, const FIEProblem& problem, double h) {
  if (problem.exact.kind == ExactSolution::Kind::none)
    throw ConfigError("problem '" + problem.name + "' has no exact solution");
  double err = 0;
  for (double x : grid(h, sol.basis.b.sign() >= 0 || sol.vanishes_at_left)) err = std::max(err, std::abs(solution_value(sol, x) - *exact_value(problem, x)));
  return err;
}

double max_difference(const SolutionFunction& a, const SolutionFunction& b, double h) {
  bool left = (a.basis.b.sign() >= 0 || a.vanishes_at_left) && (b.basis.b.sign() >= 0 || b.vanishes_at_left);
  double d = 0;
  for (double x : grid(h, left)) d = std::max(d, std::abs(solution_value(a, x) - solution_value(b, x)));
  return d;
}

}  // namespace jfp
