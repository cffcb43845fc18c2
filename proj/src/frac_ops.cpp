#include "jfp/frac_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jfp/errors.hpp"

namespace jfp {

LambdaMatrix lambda_matrix(const Param& delta, const Param& gamma, long k, std::size_t n, const PrecisionContext& ctx) {
  if (!(Param(-1) < delta)) throw DomainError("lambda matrix needs delta > -1, got " + delta.str());
  if (!(Param(0) < gamma)) throw DomainError("lambda matrix needs gamma > 0, got " + gamma.str());
  if (k < 1) throw DomainError("lambda matrix needs k >= 1");
  auto g = ctx.activate();
  LambdaMatrix out;
  out.delta = delta.to_real();
  out.gamma = gamma.to_real();
  out.k = k;
  Real mu = out.gamma * k;
  out.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Real a = out.delta + out.gamma * static_cast<long>(i) + 1;
    out.entries.push_back(gamma_ratio(a, mu));
  }
  return out;
}

std::string to_string(FracAlgorithm a) { return a == FracAlgorithm::triangular ? "triangular" : "recurrence"; }

Real FracIntMatrix::entry(std::size_t i, std::size_t j) const {
  if (j >= columns.size() || i >= columns[j].size()) return Real(0);
  return columns[j][i];
}

RealMatrix FracIntMatrix::section(std::size_t rows, std::size_t ncols) const {
  if (ncols > columns.size()) throw InternalError("fractional integration matrix has too few columns");
  RealMatrix out(rows, ncols);
  for (std::size_t j = 0; j < ncols; ++j)
    for (std::size_t i = 0; i < rows && i < columns[j].size(); ++i) out(i, j) = columns[j][i];
  return out;
}

Dense<double> FracIntMatrix::section_double(std::size_t rows, std::size_t ncols) const {
  if (ncols > columns.size()) throw InternalError("fractional integration matrix has too few columns");
  Dense<double> out(rows, ncols);
  for (std::size_t j = 0; j < ncols; ++j)
    for (std::size_t i = 0; i < rows && i < columns[j].size(); ++i) out(i, j) = columns[j][i].to_double();
  return out;
}

Real FracIntMatrix::max_difference(const FracIntMatrix& other) const {
  long bits = std::max(precision, other.precision) + 16;
  mp::ScopedPrecision g(bits);
  Real m(0);
  std::size_t nc = std::min(cols(), other.cols());
  for (std::size_t j = 0; j < nc; ++j) {
    std::size_t nr = std::max(columns[j].size(), other.columns[j].size());
    for (std::size_t i = 0; i < nr; ++i) {
      Real d = mp::abs(entry(i, j) - other.entry(i, j));
      if (m < d) m = d;
    }
  }
  return m;
}

long k_star_of(const JFPParams& params, const Param& mu) {
  if (!(Param(0) < mu)) throw DomainError("integration order must be positive, got " + mu.str());
  Param prod = mu * params.p;
  if (!prod.is_integer() || prod.to_integer() < 1)
    throw DomainError("mu * p must be a positive integer; mu = " + mu.str() + ", p = " + params.p.str());
  return prod.to_integer();
}

FracIntMatrix algorithm1(const JFPParams& params, const Param& mu, std::size_t n, const PrecisionContext& ctx) {
  long k = k_star_of(params, mu);
  Param gamma = Param(1) / params.p;
  Param delta = params.b / params.p;
  std::size_t big = n + static_cast<std::size_t>(k);
  RealMatrix c = connection_matrix(params.jacobi, big, ctx);
  LambdaMatrix lam = lambda_matrix(delta, gamma, k, n, ctx);
  auto g = ctx.activate();
  Real scale = mp::pow(Real(2), mu.to_real() - k);
  for (std::size_t i = 0; i < big; ++i)
    if (c(i, i).is_zero()) throw ConvergenceError("connection matrix is singular at row " + std::to_string(i));

  FracIntMatrix out;
  out.params = params;
  out.mu = mu;
  out.k_star = k;
  out.algorithm = FracAlgorithm::triangular;
  out.precision = ctx.q;
  out.columns.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t len = j + static_cast<std::size_t>(k) + 1;
    std::vector<Real> x(len, Real(0));
    for (std::size_t m = 0; m <= j; ++m) x[m + static_cast<std::size_t>(k)] = scale * lam.entries[m] * c(m, j);
    for (std::size_t ii = len; ii-- > 0;) {
      Real acc = x[ii];
      for (std::size_t l = ii + 1; l < len; ++l)
        if (!x[l].is_zero()) acc.fma_sub(c(ii, l), x[l]);
      acc /= c(ii, ii);
      if (!acc.is_finite())
        throw ConvergenceError("triangular solve failed in column " + std::to_string(j) + " at row " +
                               std::to_string(ii));
      x[ii] = std::move(acc);
    }
    out.columns[j] = std::move(x);
  }
  return out;
}

bool recurrence_applicable(const JFPParams& params, const Param& mu) {
  return mu.is_rational() && int_matrix_admissible(params);
}

namespace {

struct RecurrenceOperators {
  RealBanded b, c;
};

RecurrenceOperators recurrence_operators(const JFPParams& params, const Param& mu, std::size_t size,
                                         const PrecisionContext& ctx, SylvesterForm form) {
  RealBanded x = mult_x_matrix(params, size, ctx);
  RealBanded integ = int_matrix(params, size, ctx);
  auto g = ctx.activate();
  if (form == SylvesterForm::commutation) return {integ, integ};
  RealBanded scaled = integ;
  scaled *= mu.to_real();
  return {x + scaled, x};
}

/// Appends columns to `a` (which holds at least p columns) until it has n
/// columns. `after_column` is called with the index of each new column and
/// may request an early stop.
void run_recurrence(std::vector<std::vector<Real>>& a, const RecurrenceOperators& ops, long p, long k, std::size_t n,
                    const std::function<bool(std::size_t)>& after_column = {}) {
  const RealBanded& bm = ops.b;
  const RealBanded& cm = ops.c;
  auto a_entry = [&](std::size_t row, std::size_t col) -> const Real* {
    if (col >= a.size() || row >= a[col].size()) return nullptr;
    return &a[col][row];
  };
  std::size_t pu = static_cast<std::size_t>(p);
  for (std::size_t nn = 0; a.size() < n; ++nn) {
    std::size_t target = nn + pu;
    if (target < a.size()) continue;
    if (!bm.in_band(target, nn) || bm.at(target, nn).is_zero())
      throw ConvergenceError("zero recurrence pivot for column " + std::to_string(target));
    const Real& pivot = bm.at(target, nn);
    std::size_t len = target + static_cast<std::size_t>(k) + 1;
    std::vector<Real> col;
    col.reserve(len);
    for (std::size_t m = 0; m < len; ++m) {
      Real acc(0);
      std::size_t lo = m >= pu ? m - pu : 0;
      for (std::size_t l = lo; l <= m + pu; ++l) {
        const Real* v = a_entry(l, nn);
        if (v == nullptr || !cm.in_band(m, l)) continue;
        acc.fma_add(cm.at(m, l), *v);
      }
      std::size_t lo2 = nn >= pu ? nn - pu : 0;
      for (std::size_t l = lo2; l < nn + pu; ++l) {
        const Real* v = a_entry(m, l);
        if (v == nullptr || !bm.in_band(l, nn)) continue;
        acc.fma_sub(*v, bm.at(l, nn));
      }
      acc /= pivot;
      col.push_back(std::move(acc));
    }
    a.push_back(std::move(col));
    if (after_column && after_column(target)) return;
  }
}

}  // namespace

FracIntMatrix algorithm2(const JFPParams& params, const Param& mu, std::size_t n, const FracIntMatrix& seed,
                         const PrecisionContext& ctx, SylvesterForm form) {
  if (!recurrence_applicable(params, mu))
    throw DomainError("column recurrence needs rational mu and an integration matrix for " + params.str());
  long k = k_star_of(params, mu);
  long p = params.p.to_integer();
  if (seed.cols() < static_cast<std::size_t>(p)) throw DomainError("column recurrence needs p seed columns");
  std::size_t size = n + static_cast<std::size_t>(k + 2 * p + 2);
  RecurrenceOperators ops = recurrence_operators(params, mu, size, ctx, form);
  auto g = ctx.activate();
  FracIntMatrix out;
  out.params = params;
  out.mu = mu;
  out.k_star = k;
  out.algorithm = FracAlgorithm::recurrence;
  out.precision = ctx.q;
  for (std::size_t j = 0; j < static_cast<std::size_t>(p) && j < n; ++j) {
    std::vector<Real> col = seed.columns[j];
    for (auto& v : col) v.round_to(ctx.q);
    out.columns.push_back(std::move(col));
  }
  run_recurrence(out.columns, ops, p, k, n);
  return out;
}

double ErrorModel::log2_growth_rate(std::size_t m) const {
  if (log2_error.size() < 2) return 0;
  m = std::min(m, log2_error.size() - 1);
  std::size_t w = std::min<std::size_t>(128, m);
  if (w == 0) return 0;
  return (log2_error[m] - log2_error[m - w]) / static_cast<double>(w);
}

double ErrorModel::predict_log2_error(long q, std::size_t n) const {
  if (log2_envelope.empty()) return 0;
  double m = static_cast<double>(n) * static_cast<double>(q0) / static_cast<double>(q);
  double scale = static_cast<double>(q) / static_cast<double>(q0);
  std::size_t last = log2_envelope.size() - 1;
  if (m <= static_cast<double>(last)) {
    std::size_t lo = static_cast<std::size_t>(std::floor(m));
    std::size_t hi = std::min(lo + 1, last);
    double t = m - static_cast<double>(lo);
    return scale * ((1 - t) * log2_envelope[lo] + t * log2_envelope[hi]);
  }
  // extrapolate with the trailing averaged growth rate
  double rate = std::max(0.0, log2_growth_rate(last));
  return scale * (log2_envelope[last] + rate * (m - static_cast<double>(last)));
}

ErrorModel simulate_error(const JFPParams& params, const Param& mu, long q0, std::size_t m_max,
                          const std::function<bool(std::size_t, double)>& stop) {
  if (q0 < 24) throw DomainError("simulation precision must be at least 24 bits");
  if (!recurrence_applicable(params, mu))
    throw DomainError("error simulation applies to the column recurrence only");
  long k = k_star_of(params, mu);
  long p = params.p.to_integer();
  PrecisionContext ctx(q0);
  std::size_t total = static_cast<std::size_t>(p) + m_max;
  std::size_t size = total + static_cast<std::size_t>(k + 2 * p + 2);
  RecurrenceOperators ops = recurrence_operators(params, mu, size, ctx, SylvesterForm::multiplication);
  auto g = ctx.activate();

  // one run per unit entry of the last seed column
  std::size_t seed_rows = static_cast<std::size_t>(p - 1 + k + 1);
  std::vector<std::vector<std::vector<Real>>> runs(seed_rows);
  for (std::size_t r = 0; r < seed_rows; ++r) {
    auto& a = runs[r];
    for (long j = 0; j < p; ++j) a.emplace_back(static_cast<std::size_t>(j + k + 1), Real(0));
    a.back()[r] = Real(1);
  }

  ErrorModel model;
  model.q0 = q0;
  model.log2_error.push_back(0);
  model.log2_envelope.push_back(0);
  for (std::size_t m = 1; m <= m_max; ++m) {
    std::size_t want = static_cast<std::size_t>(p) + m;
    double worst = -std::numeric_limits<double>::infinity();
    for (auto& a : runs) {
      run_recurrence(a, ops, p, k, want);
      Real mx(0);
      for (const Real& v : a.back()) {
        Real av = mp::abs(v);
        if (mx < av) mx = av;
      }
      if (!mx.is_zero()) worst = std::max(worst, mp::log2(mx).to_double());
    }
    if (!std::isfinite(worst)) worst = model.log2_error.back();
    model.log2_error.push_back(worst);
    model.log2_envelope.push_back(std::max(model.log2_envelope.back(), worst));
    if (stop && stop(m, model.log2_envelope.back())) break;
  }
  return model;
}

PrecisionChoice choose_precision(std::size_t n, double delta, const ErrorModel& model) {
  if (!(delta > 0 && delta < 1)) throw DomainError("target accuracy must lie in (0, 1)");
  PrecisionChoice out;
  out.q0 = model.q0;
  double log2_delta = std::log2(delta);
  std::size_t m_star = 0;
  for (std::size_t m = 1; m < model.log2_envelope.size(); ++m) {
    double bound = static_cast<double>(model.q0) + static_cast<double>(m) / static_cast<double>(n) * log2_delta;
    if (!(model.log2_envelope[m] < bound)) break;
    m_star = m;
  }
  out.m_star = m_star;
  if (m_star == 0) return out;
  out.q = static_cast<long>(std::ceil(static_cast<double>(n) * static_cast<double>(model.q0) /
                                      static_cast<double>(m_star)));
  out.q = std::max(out.q, 24L);
  return out;
}

namespace {

/// Allowance for the gap between simulated and actual error growth.
constexpr long kGrowthMarginBits = 8;

/// Error of a triangular build at q bits, measured on the last column
/// against a rebuild with 64 extra bits.
double triangular_error(const JFPParams& params, const Param& mu, std::size_t n, long q) {
  FracIntMatrix lo = algorithm1(params, mu, n, PrecisionContext(q));
  FracIntMatrix hi = algorithm1(params, mu, n, PrecisionContext(q + 64));
  return lo.max_difference(hi).to_double();
}

FracIntMatrix triangular_auto(const JFPParams& params, const Param& mu, std::size_t n, double delta, long q0) {
  long q = std::max(q0, 53L);
  for (int iter = 0; iter < 12; ++iter) {
    double err = triangular_error(params, mu, n, q);
    if (err <= delta / 4) {
      FracIntMatrix out = algorithm1(params, mu, n, PrecisionContext(q));
      out.error_estimate = err;
      return out;
    }
    double extra = err > 0 ? std::log2(err / delta) : 0;
    q += std::max(16L, static_cast<long>(std::ceil(extra)) + 8);
  }
  throw ConvergenceError("triangular build did not reach the requested accuracy");
}

FracIntMatrix seeds_for(const JFPParams& params, const Param& mu, long q) {
  long p = params.p.to_integer();
  // seed columns are well conditioned; a modest guard suffices
  return algorithm1(params, mu, static_cast<std::size_t>(p), PrecisionContext(q + 32));
}

}  // namespace

FracIntMatrix pseudo_stabilized(const JFPParams& params, const Param& mu, std::size_t n, double delta, long q0) {
  if (!(delta > 0 && delta < 1)) throw DomainError("target accuracy must lie in (0, 1)");
  k_star_of(params, mu);
  if (!recurrence_applicable(params, mu) || n <= static_cast<std::size_t>(params.p.to_integer()))
    return triangular_auto(params, mu, n, delta, q0);

  double log2_delta = std::log2(delta);
  long p = params.p.to_integer();
  std::size_t steps = n - static_cast<std::size_t>(p);
  for (long sim_q = q0;; sim_q *= 2) {
    if (sim_q > 1L << 16) throw ConvergenceError("precision selection diverged");
    ErrorModel model = simulate_error(params, mu, sim_q, steps);
    PrecisionChoice choice = choose_precision(n, delta, model);
    if (choice.m_star == 0) continue;
    // the scaling law also scales the early transient; never go below the
    // precision implied directly by the simulated growth over all columns
    double direct_log2 = model.log2_envelope.back();
    long q_direct = static_cast<long>(std::ceil(direct_log2 - log2_delta)) + kGrowthMarginBits;
    long q = std::max(choice.q, q_direct);
    FracIntMatrix seed = seeds_for(params, mu, q);
    FracIntMatrix out = algorithm2(params, mu, n, seed, PrecisionContext(q));
    double log2_growth = std::max(model.predict_log2_error(q, n), direct_log2);
    out.error_estimate = std::exp2(log2_growth - static_cast<double>(q));
    return out;
  }
}

FracIntMatrix build_at_precision(const JFPParams& params, const Param& mu, std::size_t n, long q) {
  k_star_of(params, mu);
  if (!recurrence_applicable(params, mu) || n <= static_cast<std::size_t>(params.p.to_integer()))
    return algorithm1(params, mu, n, PrecisionContext(q));
  FracIntMatrix seed = seeds_for(params, mu, q);
  return algorithm2(params, mu, n, seed, PrecisionContext(q));
}

}  // namespace jfp
