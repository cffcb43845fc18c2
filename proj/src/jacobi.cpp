#include "jfp/jacobi.hpp"

#include <Eigen/Dense>

#include <algorithm>

#include "jfp/errors.hpp"

namespace jfp {

JacobiParams JacobiParams::checked(const Param& alpha, const Param& beta) {
  if (!(Param(-1) < alpha) || !(Param(-1) < beta))
    throw DomainError("Jacobi parameters must exceed -1, got (" + alpha.str() + ", " + beta.str() + ")");
  return {alpha, beta};
}

RecurrenceCoeffs recurrence(const Real& alpha, const Real& beta, long n) {
  if (n == 0) {
    return {(alpha + beta + 2) / 2, (alpha - beta) / 2, Real(0)};
  }
  Real s = alpha + beta + 2 * n;
  Real d = Real(2 * (n + 1)) * (alpha + beta + (n + 1)) * s;
  Real a = (s + 1) * (s + 2) * s / d;
  Real b = (s + 1) * (alpha * alpha - beta * beta) / d;
  Real c = Real(2) * (alpha + n) * (beta + n) * (s + 2) / d;
  return {a, b, c};
}

std::vector<Real> jacobi_eval_all(const Real& alpha, const Real& beta, long n_max, const Real& x) {
  std::vector<Real> p;
  p.reserve(static_cast<std::size_t>(n_max + 1));
  p.emplace_back(1);
  if (n_max == 0) return p;
  for (long n = 0; n < n_max; ++n) {
    RecurrenceCoeffs r = recurrence(alpha, beta, n);
    Real next = (r.a * x + r.b) * p[static_cast<std::size_t>(n)];
    if (n > 0) next -= r.c * p[static_cast<std::size_t>(n - 1)];
    p.push_back(std::move(next));
  }
  return p;
}

Real jacobi_eval(const JacobiParams& jp, long n, const Real& x, const PrecisionContext& ctx) {
  auto g = ctx.activate();
  Real a = jp.alpha.to_real(), b = jp.beta.to_real();
  return jacobi_eval_all(a, b, n, x).back();
}

Real jacobi_clenshaw(const Real& alpha, const Real& beta, const std::vector<Real>& c, const Real& x) {
  Real b1(0), b2(0);
  for (long k = static_cast<long>(c.size()) - 1; k >= 0; --k) {
    RecurrenceCoeffs r = recurrence(alpha, beta, k);
    Real bk = c[static_cast<std::size_t>(k)] + (r.a * x + r.b) * b1;
    if (k + 1 < static_cast<long>(c.size())) bk -= recurrence(alpha, beta, k + 1).c * b2;
    b2 = std::move(b1);
    b1 = std::move(bk);
  }
  return b1;
}

double jacobi_clenshaw(double alpha, double beta, const std::vector<double>& c, double x) {
  double b1 = 0, b2 = 0, c_next = 0;
  for (long k = static_cast<long>(c.size()) - 1; k >= 0; --k) {
    double a, b, cc;
    if (k == 0) {
      a = (alpha + beta + 2) / 2;
      b = (alpha - beta) / 2;
      cc = 0;
    } else {
      double s = alpha + beta + 2.0 * k;
      double d = 2.0 * (k + 1) * (k + alpha + beta + 1) * s;
      a = (s + 1) * (s + 2) * s / d;
      b = (s + 1) * (alpha * alpha - beta * beta) / d;
      cc = 2 * (k + alpha) * (k + beta) * (s + 2) / d;
    }
    double bk = c[static_cast<std::size_t>(k)] + (a * x + b) * b1 - c_next * b2;
    b2 = b1;
    b1 = bk;
    c_next = cc;
  }
  return b1;
}

Real jacobi_clenshaw_derivative(const Real& alpha, const Real& beta, const std::vector<Real>& c, const Real& x) {
  if (c.size() < 2) return Real(0);
  std::vector<Real> d;
  d.reserve(c.size() - 1);
  for (std::size_t n = 1; n < c.size(); ++n) d.push_back(c[n] * (alpha + beta + static_cast<long>(n + 1)) / 2);
  return jacobi_clenshaw(alpha + 1, beta + 1, d, x);
}

RealMatrix connection_matrix(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx) {
  auto g = ctx.activate();
  Real a = jp.alpha.to_real(), b = jp.beta.to_real();
  RealMatrix c(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    long nn = static_cast<long>(col);
    // C_{0,n} = (-1)^n (b+1)_n / n!
    Real v(1);
    for (long i = 0; i < nn; ++i) {
      v *= b + (i + 1);
      v /= -(i + 1);
    }
    c(0, col) = v;
    for (long k = 0; k < nn; ++k) {
      v *= -(a + b + (nn + 1 + k)) * Real(nn - k);
      v /= Real(2 * (k + 1)) * (b + (k + 1));
      c(static_cast<std::size_t>(k + 1), col) = v;
    }
  }
  return c;
}

RealMatrix gram_matrix(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx) {
  auto g = ctx.activate();
  Real a = jp.alpha.to_real(), b = jp.beta.to_real();
  RealMatrix m(n, n);
  for (std::size_t s = 0; s + 1 < 2 * n; ++s) {
    long sl = static_cast<long>(s);
    Real v = mp::pow(Real(2), a + b + (sl + 1)) * beta(b + (sl + 1), a + 1);
    for (std::size_t i = (s < n ? 0 : s - n + 1); i <= s && i < n; ++i) m(i, s - i) = v;
  }
  return m;
}

std::vector<Real> jacobi_norms(const Real& a, const Real& b, std::size_t n) {
  std::vector<Real> h;
  h.reserve(n);
  Real scale = mp::pow(Real(2), a + b + 1);
  for (std::size_t k = 0; k < n; ++k) {
    long kl = static_cast<long>(k);
    if (k == 0) {
      h.push_back(scale * gamma(a + 1) * gamma(b + 1) / gamma(a + b + 2));
      continue;
    }
    if (a + b + (kl + 1) <= 0L) throw DomainError("jacobi_norms: unsupported parameters");
    // Gamma(n+a+1) Gamma(n+b+1) / (Gamma(n+a+b+1) n!)
    Real r = mp::exp(lgamma(a + (kl + 1)) + lgamma(b + (kl + 1)) - lgamma(a + b + (kl + 1)) - lgamma(Real(kl + 1)));
    h.push_back(scale * r / (a + b + (2 * kl + 1)));
  }
  return h;
}

std::vector<Real> jacobi_norms(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx) {
  auto g = ctx.activate();
  return jacobi_norms(jp.alpha.to_real(), jp.beta.to_real(), n);
}

RealMatrix connection_inverse(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx) {
  long guard = 4 * static_cast<long>(n) + 32;
  PrecisionContext hi(ctx.q + guard);
  RealMatrix c = connection_matrix(jp, n, hi);
  RealMatrix m = gram_matrix(jp, n, hi);
  std::vector<Real> h = jacobi_norms(jp, n, hi);
  auto g = hi.activate();
  RealMatrix out(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      Real s(0);
      for (std::size_t k = 0; k <= i; ++k) s.fma_add(c(k, i), m(k, j));
      s /= h[i];
      out(i, j) = std::move(s);
    }
  auto g2 = ctx.activate();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) out(i, j).round_to(ctx.q);
  return out;
}

namespace {

/// One-step conversion raising beta (raise_alpha = false) or alpha by one.
RealBanded conversion_step(const Real& a, const Real& b, bool raise_alpha, std::size_t n) {
  RealBanded r(n, n, 0, 1);
  for (std::size_t k = 0; k < n; ++k) {
    long kl = static_cast<long>(k);
    if (k == 0) {
      r.at(0, 0) = Real(1);
      continue;
    }
    Real den = a + b + (2 * kl + 1);
    r.at(k, k) = (a + b + (kl + 1)) / den;
    r.at(k - 1, k) = raise_alpha ? -(b + kl) / den : (a + kl) / den;
  }
  return r;
}

/// One-step weighted conversion lowering beta (weight 1+x) or alpha (1-x).
RealBanded weighted_step(const Real& a, const Real& b, bool alpha_side, std::size_t n) {
  // (1+x) P^{(a,b+1)} = P^{(a,b)} L  or  (1-x) P^{(a+1,b)} = P^{(a,b)} L
  RealBanded l(n, n, 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    long kl = static_cast<long>(k);
    Real den = a + b + (2 * kl + 2);
    if (alpha_side) {
      l.at(k, k) = Real(2) * (a + (kl + 1)) / den;
      if (k + 1 < n) l.at(k + 1, k) = Real(-2 * (kl + 1)) / den;
    } else {
      l.at(k, k) = Real(2) * (b + (kl + 1)) / den;
      if (k + 1 < n) l.at(k + 1, k) = Real(2 * (kl + 1)) / den;
    }
  }
  return l;
}

}  // namespace

RealBanded conversion_R(const JacobiParams& jp, long k, long j, std::size_t n, const PrecisionContext& ctx) {
  if (k < 0 || j < 0) throw DomainError("conversion_R: shifts must be non-negative");
  auto g = ctx.activate();
  Real a = jp.alpha.to_real(), b = jp.beta.to_real();
  RealBanded total = RealBanded::identity(n);
  for (long s = 0; s < j; ++s) total = conversion_step(a, b + s, false, n) * total;
  for (long s = 0; s < k; ++s) total = conversion_step(a + s, b + j, true, n) * total;
  RealBanded out(n, n, 0, k + j);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = out.col_begin(c); r < out.col_end(c); ++r) out.at(r, c) = total.get(r, c);
  return out;
}

RealBanded weighted_conversion_L(const JacobiParams& jp, long k, long j, std::size_t n,
                                 const PrecisionContext& ctx) {
  if (k < 0 || j < 0) throw DomainError("weighted_conversion_L: shifts must be non-negative");
  auto g = ctx.activate();
  Real a = jp.alpha.to_real(), b = jp.beta.to_real();
  RealBanded total = RealBanded::identity(n);
  for (long s = 0; s < j; ++s) total = total * weighted_step(a, b + s, false, n);
  for (long s = 0; s < k; ++s) total = total * weighted_step(a + s, b + j, true, n);
  RealBanded out(n, n, k + j, 0);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = out.col_begin(c); r < out.col_end(c); ++r) out.at(r, c) = total.get(r, c);
  return out;
}

std::vector<Real> weighted_diff_W(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx) {
  auto g = ctx.activate();
  Real b = jp.beta.to_real();
  std::vector<Real> w;
  w.reserve(n);
  for (std::size_t k = 0; k < n; ++k) w.push_back(b + static_cast<long>(k + 1));
  return w;
}

RealBanded mult_1px(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx) {
  RealBanded l = weighted_conversion_L(jp, 0, 1, n, ctx);
  RealBanded r = conversion_R(jp, 0, 1, n, ctx);
  auto g = ctx.activate();
  RealBanded prod = l * r;
  RealBanded out(n, n, 1, 1);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = out.col_begin(c); i < out.col_end(c); ++i) out.at(i, c) = prod.get(i, c);
  return out;
}

RealBanded jacobi_operator(const JacobiParams& jp, std::size_t n, const PrecisionContext& ctx) {
  auto g = ctx.activate();
  Real a = jp.alpha.to_real(), b = jp.beta.to_real();
  RealBanded j(n, n, 1, 1);
  for (std::size_t k = 0; k < n; ++k) {
    RecurrenceCoeffs r = recurrence(a, b, static_cast<long>(k));
    // x P_k = P_{k+1}/a_k - (b_k/a_k) P_k + (c_k/a_k) P_{k-1}
    j.at(k, k) = -r.b / r.a;
    if (k + 1 < n) j.at(k + 1, k) = Real(1) / r.a;
    if (k > 0) j.at(k - 1, k) = r.c / r.a;
  }
  return j;
}

double condition_number(const Dense<double>& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  double smin = s(s.size() - 1);
  return smin == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / smin;
}

}  // namespace jfp
