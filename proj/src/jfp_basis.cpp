#include "jfp/jfp_basis.hpp"

#include <cmath>

#include "jfp/errors.hpp"

namespace jfp {

JFPParams JFPParams::checked(const Param& alpha, const Param& beta, const Param& b, const Param& p) {
  JacobiParams jp = JacobiParams::checked(alpha, beta);
  if (!(Param(0) < p)) throw DomainError("power p must be positive, got " + p.str());
  return {jp, b, p};
}

std::string JFPParams::str() const {
  return "(alpha=" + jacobi.alpha.str() + ", beta=" + jacobi.beta.str() + ", b=" + b.str() + ", p=" + p.str() + ")";
}

Real map_to_y(const Real& x, const Real& p) {
  if (p == Real(1)) return x;
  Real t = (x + 1) / 2;
  if (t.sign() <= 0) return Real(-1);
  return 2 * mp::pow(t, Real(1) / p) - 1;
}

Real map_to_x(const Real& y, const Real& p) {
  if (p == Real(1)) return y;
  Real t = (y + 1) / 2;
  if (t.sign() <= 0) return Real(-1);
  return 2 * mp::pow(t, p) - 1;
}

namespace {

Real weight_factor(const Real& y, const Real& b) {
  Real one_py = y + 1;
  if (b.is_zero()) return Real(1);
  if (one_py.sign() <= 0) {
    if (b.sign() < 0) throw DomainError("JFP basis with b < 0 is singular at x = -1");
    return Real(0);
  }
  return mp::pow(one_py, b);
}

}  // namespace

Real jfp_eval(const JFPParams& params, long n, const Real& x, const PrecisionContext& ctx) {
  auto g = ctx.activate();
  Real y = map_to_y(x, params.p.to_real());
  Real w = weight_factor(y, params.b.to_real());
  return w * jacobi_eval_all(params.jacobi.alpha.to_real(), params.jacobi.beta.to_real(), n, y).back();
}

Real jfp_sum(const JFPParams& params, const std::vector<Real>& coeffs, const Real& x) {
  Real y = map_to_y(x, params.p.to_real());
  Real w = weight_factor(y, params.b.to_real());
  return w * jacobi_clenshaw(params.jacobi.alpha.to_real(), params.jacobi.beta.to_real(), coeffs, y);
}

double jfp_sum(const JFPParams& params, const std::vector<double>& coeffs, double x) {
  return jfp_sum_offset(params, coeffs, x + 1);
}

double jfp_sum_offset(const JFPParams& params, const std::vector<double>& coeffs, double opx) {
  double p = params.p.to_double(), b = params.b.to_double();
  double t = opx / 2;
  double y = p == 1 ? opx - 1 : (t <= 0 ? -1.0 : 2 * std::pow(t, 1 / p) - 1);
  double opy = p == 1 ? opx : (t <= 0 ? 0.0 : 2 * std::pow(t, 1 / p));
  double w = 1;
  if (b != 0) {
    if (opy <= 0) {
      if (b < 0) throw DomainError("JFP basis with b < 0 is singular at x = -1");
      w = 0;
    } else {
      w = std::pow(opy, b);
    }
  }
  return w * jacobi_clenshaw(params.jacobi.alpha.to_double(), params.jacobi.beta.to_double(), coeffs, y);
}

std::vector<Real> scaling_D(const Param& b, const Param& p, std::size_t n, const PrecisionContext& ctx) {
  auto g = ctx.activate();
  Real e = Real(1) - Real(1) / p.to_real();
  Real bb = b.to_real();
  std::vector<Real> d;
  d.reserve(n);
  for (std::size_t k = 0; k < n; ++k) d.push_back(mp::pow(Real(2), (bb + static_cast<long>(k)) * e));
  return d;
}

RealBanded mult_x_matrix(const JFPParams& params, std::size_t n, const PrecisionContext& ctx) {
  if (!params.integer_p() || params.p.to_integer() < 1)
    throw DomainError("multiplication matrix needs a positive integer p, got " + params.p.str());
  long p = params.p.to_integer();
  std::size_t big = n + static_cast<std::size_t>(p);
  RealBanded t = mult_1px(params.jacobi, big, ctx);
  auto g = ctx.activate();
  RealBanded pw = t;
  for (long i = 1; i < p; ++i) pw = pw * t;
  pw *= mp::ldexp(Real(1), 1 - p);
  RealBanded out(n, n, p, p);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = out.col_begin(j); i < out.col_end(j); ++i) {
      out.at(i, j) = pw.get(i, j);
      if (i == j) out.at(i, j) -= 1L;
    }
  return out;
}

bool int_matrix_admissible(const JFPParams& params) {
  auto natural = [](const Param& v) { return v.is_integer() && v.to_integer() >= 0; };
  const Param& beta = params.jacobi.beta;
  if (!natural(params.p) || params.p.to_integer() < 1) return false;
  if (!params.b.is_rational() || !beta.is_rational()) return false;
  return natural(beta - params.b) && natural(params.b + params.p - Param(1) - beta);
}

RealBanded int_matrix(const JFPParams& params, std::size_t n, const PrecisionContext& ctx) {
  if (!int_matrix_admissible(params))
    throw DomainError("integration matrix needs p, beta - b and b + p - 1 - beta to be non-negative integers; got " +
                      params.str());
  const Param& alpha = params.jacobi.alpha;
  const Param& beta = params.jacobi.beta;
  const Param& b = params.b;
  long p = params.p.to_integer();
  long beta_minus_b = (beta - b).to_integer();
  long top_shift = (b + params.p - Param(1) - beta).to_integer();

  RealBanded r_inner = conversion_R(params.jacobi, 0, top_shift, n, ctx);
  JacobiParams lowered{alpha - Param(1), b + params.p};
  RealBanded r_outer = conversion_R(lowered, 1, beta_minus_b, n, ctx);
  RealBanded l = weighted_conversion_L(params.jacobi, 0, p, n, ctx);
  auto g = ctx.activate();
  Real bp = (b + params.p).to_real();
  if (bp.sign() <= 0) throw DomainError("integration matrix needs b + p > 0");
  RealBanded lr = l * r_outer;
  // scale column m by 1 / (m + b + p)
  for (std::size_t j = 0; j < n; ++j) {
    Real inv = Real(1) / (bp + static_cast<long>(j));
    for (std::size_t i = lr.col_begin(j); i < lr.col_end(j); ++i) lr.at(i, j) *= inv;
  }
  RealBanded prod = lr * r_inner;
  prod *= Real(p) / mp::ldexp(Real(1), p - 1);
  RealBanded out(n, n, p, p);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = out.col_begin(j); i < out.col_end(j); ++i) out.at(i, j) = prod.get(i, j);
  return out;
}

}  // namespace jfp
