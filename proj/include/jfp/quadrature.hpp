#pragma once

// Gauss-Jacobi quadrature at arbitrary precision.

#include <cstddef>
#include <functional>
#include <vector>

#include "jfp/jacobi.hpp"

namespace jfp {

/// Nodes and weights for the weight (1-y)^alpha (1+y)^beta on [-1, 1].
struct GaussRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

/// n-point rule at ctx.q bits: double-precision eigenvalues of the Jacobi
/// matrix refined by Newton's method on P_n.
GaussRule gauss_jacobi(const Real& alpha, const Real& beta, std::size_t n, const PrecisionContext& ctx);

/// Jacobi coefficients c_k = <h, P_k> / <P_k, P_k>, k < m, of h sampled at
/// the nodes of `rule` (which must use the same alpha, beta).
std::vector<Real> jacobi_coefficients(const Real& alpha, const Real& beta, const GaussRule& rule,
                                      const std::vector<Real>& values, std::size_t m);

/// Riemann-Liouville integral I^mu[(1+t)^sigma g(t)](x) from -1 for g smooth
/// in (1+t)^(1/root), by an n-point rule after the substitution
/// t = -1 + (1+x)((1+r)/2)^root that makes the integrand smooth in r.
Real frac_integral_quad(const std::function<Real(const Real&)>& g, const Real& mu, const Real& sigma, long root,
                        const Real& x, std::size_t n, const PrecisionContext& ctx);

}  // namespace jfp
