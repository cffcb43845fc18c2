#include "jfp/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "jfp/errors.hpp"

namespace jfp {

namespace {

/// Eigenvalues of the symmetric Jacobi matrix in double precision.
std::vector<double> initial_nodes(double a, double b, std::size_t n) {
  Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
  Eigen::VectorXd off(static_cast<Eigen::Index>(n > 1 ? n - 1 : 1));
  for (std::size_t k = 0; k < n; ++k) {
    double s = 2.0 * static_cast<double>(k) + a + b;
    diag[static_cast<Eigen::Index>(k)] = k == 0 ? (b - a) / (a + b + 2) : (b * b - a * a) / (s * (s + 2));
  }
  for (std::size_t k = 1; k < n; ++k) {
    double kk = static_cast<double>(k), s = 2 * kk + a + b;
    double v = k == 1 ? 4 * (1 + a) * (1 + b) / ((2 + a + b) * (2 + a + b) * (3 + a + b))
                      : 4 * kk * (kk + a) * (kk + b) * (kk + a + b) / (s * s * (s + 1) * (s - 1));
    off[static_cast<Eigen::Index>(k - 1)] = std::sqrt(v);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off.head(static_cast<Eigen::Index>(n - 1)), Eigen::EigenvaluesOnly);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = es.eigenvalues()[static_cast<Eigen::Index>(k)];
  return out;
}

/// P_n(x) and P_n'(x).
std::pair<Real, Real> value_and_derivative(const Real& a, const Real& b, long n, const Real& x) {
  Real v = jacobi_eval_all(a, b, n, x).back();
  Real d = (a + b + (n + 1)) / 2 * jacobi_eval_all(a + 1, b + 1, n - 1, x).back();
  return {v, d};
}

}  // namespace

GaussRule gauss_jacobi(const Real& alpha, const Real& beta, std::size_t n, const PrecisionContext& ctx) {
  if (n == 0) throw DomainError("quadrature needs at least one node");
  auto g = ctx.activate();
  Real a = alpha, b = beta;
  a.round_to(ctx.q);
  b.round_to(ctx.q);
  if (!(Real(-1) < a) || !(Real(-1) < b)) throw DomainError("Jacobi weight exponents must exceed -1");
  long nl = static_cast<long>(n);
  std::vector<double> guess = initial_nodes(a.to_double(), b.to_double(), n);
  // 2^{a+b+1} Gamma(n+a+1) Gamma(n+b+1) / (Gamma(n+a+b+1) n!)
  Real scale = mp::exp((a + b + 1) * mp::log(Real(2)) + lgamma(a + (nl + 1)) + lgamma(b + (nl + 1)) -
                       lgamma(a + b + (nl + 1)) - lgamma(Real(nl + 1)));
  Real tol = mp::ldexp(Real(1), 4 - ctx.q);
  GaussRule rule;
  for (double x0 : guess) {
    Real x(x0);
    Real deriv;
    for (int it = 0; it < 100; ++it) {
      auto [v, d] = value_and_derivative(a, b, nl, x);
      Real dx = v / d;
      x -= dx;
      deriv = d;
      if (mp::abs(dx) <= tol) {
        deriv = value_and_derivative(a, b, nl, x).second;
        break;
      }
      if (it == 99) throw ConvergenceError("Newton iteration for quadrature nodes did not converge");
    }
    rule.nodes.push_back(x);
    rule.weights.push_back(scale / ((1 - x * x) * deriv * deriv));
  }
  return rule;
}

std::vector<Real> jacobi_coefficients(const Real& alpha, const Real& beta, const GaussRule& rule,
                                      const std::vector<Real>& values, std::size_t m) {
  if (values.size() != rule.nodes.size()) throw InternalError("sample count differs from quadrature size");
  std::vector<Real> c(m, Real(0));
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    auto p = jacobi_eval_all(alpha, beta, static_cast<long>(m) - 1, rule.nodes[k]);
    Real wv = rule.weights[k] * values[k];
    for (std::size_t j = 0; j < m; ++j) c[j].fma_add(wv, p[j]);
  }
  std::vector<Real> h = jacobi_norms(alpha, beta, m);
  for (std::size_t j = 0; j < m; ++j) c[j] /= h[j];
  return c;
}

Real frac_integral_quad(const std::function<Real(const Real&)>& g, const Real& mu, const Real& sigma, long root,
                        const Real& x, std::size_t n, const PrecisionContext& ctx) {
  if (root < 1) throw DomainError("root order must be a positive integer");
  auto guard = ctx.activate();
  if (!(Real(-1) < sigma) || mu.sign() <= 0) throw DomainError("fractional integral needs mu > 0 and sigma > -1");
  Real opx = x + 1;
  if (opx.sign() <= 0) return Real(0);
  Real a = mu - 1;
  Real b = sigma * root + (root - 1);
  GaussRule rule = gauss_jacobi(a, b, n, ctx);
  Real sum(0);
  for (std::size_t k = 0; k < n; ++k) {
    Real u = (rule.nodes[k] + 1) / 2;
    Real hsum(0), upow(1);
    for (long j = 0; j < root; ++j) {
      hsum += upow;
      upow *= u;
    }
    Real t = opx * upow - 1;
    sum += rule.weights[k] * mp::pow(hsum, a) * g(t);
  }
  Real pre = mp::pow(opx, mu + sigma) / gamma(mu) * Real(root) / 2 * mp::pow(Real(2), -(a + b));
  return pre * sum;
}

}  // namespace jfp
