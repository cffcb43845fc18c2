#pragma once

// Fractional integration matrices in the JFP basis and their
// pseudo-stabilized construction.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "jfp/jfp_basis.hpp"

namespace jfp {

/// Subdiagonal k of the fractional-monomial integration matrix:
/// entry (n+k, n) = Gamma(delta + n gamma + 1) / Gamma(delta + n gamma + mu + 1), mu = k gamma.
struct LambdaMatrix {
  Real delta, gamma;
  long k = 1;
  std::vector<Real> entries;
};
LambdaMatrix lambda_matrix(const Param& delta, const Param& gamma, long k, std::size_t n, const PrecisionContext& ctx);

enum class FracAlgorithm { triangular, recurrence };
std::string to_string(FracAlgorithm a);

/// Which banded Sylvester equation drives the column recurrence.
enum class SylvesterForm {
  multiplication,  // A (X + mu I) = X A
  commutation,     // A I = I A
};

/// Leading columns of the fractional integration matrix I^{(alpha,beta)}_{b,p,mu}.
/// Column j stores rows 0..j+k_star; entries below are structural zeros.
struct FracIntMatrix {
  JFPParams params;
  Param mu{1};
  long k_star = 1;
  std::vector<std::vector<Real>> columns;
  FracAlgorithm algorithm = FracAlgorithm::triangular;
  long precision = 53;
  double error_estimate = 0;

  std::size_t cols() const { return columns.size(); }
  Real entry(std::size_t i, std::size_t j) const;
  /// Leading rows x cols dense section.
  RealMatrix section(std::size_t rows, std::size_t cols) const;
  Dense<double> section_double(std::size_t rows, std::size_t cols) const;
  /// Maximum entrywise difference over the common columns.
  Real max_difference(const FracIntMatrix& other) const;
};

/// k_star = mu p, checked to be a positive integer exactly.
long k_star_of(const JFPParams& params, const Param& mu);

/// Column-independent triangular solves C I = 2^{mu(1-p)} Lambda C at ctx.q.
FracIntMatrix algorithm1(const JFPParams& params, const Param& mu, std::size_t n, const PrecisionContext& ctx);

/// Column recurrence from the banded Sylvester equations, seeded with the
/// first p columns of `seed`.
FracIntMatrix algorithm2(const JFPParams& params, const Param& mu, std::size_t n, const FracIntMatrix& seed,
                         const PrecisionContext& ctx, SylvesterForm form = SylvesterForm::multiplication);

/// Simulated normalized error growth of the column recurrence.
struct ErrorModel {
  long q0 = 53;
  /// log2 of the simulated normalized maximum error after m recurrence steps
  /// (index 0 is the last seed column, value 0).
  std::vector<double> log2_error;
  /// Running maximum of log2_error.
  std::vector<double> log2_envelope;

  /// log2 r0 averaged over a trailing window of up to 128 columns.
  double log2_growth_rate(std::size_t m) const;
  /// log2 E(q, n) predicted from the scaling law E(q, n) ~ E(q0, n q0 / q)^(q / q0).
  double predict_log2_error(long q, std::size_t n) const;
};

/// Runs the recurrence at q0 bits with unit seeds. Stops after m_max steps or
/// when `stop(m, log2_error)` returns true.
ErrorModel simulate_error(const JFPParams& params, const Param& mu, long q0, std::size_t m_max,
                          const std::function<bool(std::size_t, double)>& stop = {});

struct PrecisionChoice {
  long q = 53;
  std::size_t m_star = 0;
  long q0 = 53;
};

/// Largest m with log2 E(q0, m) < q0 + (m/N) log2 delta, then q = ceil(N q0 / m).
/// Returns m_star = 0 when even m = 1 fails.
PrecisionChoice choose_precision(std::size_t n, double delta, const ErrorModel& model);

/// Selects the precision automatically and builds the matrix with the
/// recurrence when p is an integer, mu is rational and the integration
/// matrix exists; otherwise with column-wise triangular solves.
FracIntMatrix pseudo_stabilized(const JFPParams& params, const Param& mu, std::size_t n, double delta = 1e-16,
                                long q0 = 53);

/// Builds with a fixed precision using the same routing as pseudo_stabilized.
FracIntMatrix build_at_precision(const JFPParams& params, const Param& mu, std::size_t n, long q);

bool recurrence_applicable(const JFPParams& params, const Param& mu);

}  // namespace jfp
