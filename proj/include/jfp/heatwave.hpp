#pragma once

// Time-fractional heat/wave equation D_t^mu u = u_xx (Caputo, 0 < mu <= 2) with
// periodic initial data and zero initial velocity: Fourier modes
// u_n(t) = E_mu(-n^2 t^mu) from one master FIE solve with mode rescaling.

#include <cfloat>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "jfp/fie_solver.hpp"

namespace jfp {

/// Fourier coefficients f_n, |n| <= N_f, of real 2 pi-periodic data.
struct PeriodicIC {
  /// f_{-N_f}, ..., f_{N_f}.
  std::vector<std::complex<double>> coeffs;
  long N_f = 0;
  double tol = DBL_EPSILON;
  /// Length of the sample grid the coefficients came from.
  std::size_t grid_size = 0;

  std::complex<double> coeff(long n) const;
  /// Truncated Fourier series at x.
  double value(double x) const;
  /// sum |f_n|^2.
  double energy() const;
};

/// Samples f(2 pi j / m), j = 0, ..., m-1.
std::vector<double> sample_periodic(const std::function<double(double)>& f, std::size_t m);

/// Discrete Fourier coefficients of uniform samples on [0, 2 pi), truncated at
/// the smallest N_f with |f_n| < tol * max|f_k| for every n >= N_f. The grid size
/// must be a power of two; throws ConvergenceError when the spectrum has not
/// decayed by a quarter of the grid size.
PeriodicIC fourier_decompose(const std::vector<double>& samples, double tol = DBL_EPSILON);

struct HeatWaveOptions {
  /// Preferred power; replaced by k / mu with the smallest integer k giving p >= this when mu p is not an integer.
  Param p{5};
  double delta = 1e-16;
  /// Fixed master truncation; 0 selects automatic doubling.
  std::size_t n = 0;
  std::size_t n_max = 1024;
};

struct HeatWaveSolution {
  Param mu{1};
  double T = 1;
  /// Master mode index (N_f).
  long N = 0;
  /// Master FIE coefficient N^2 (T/2)^mu.
  double lambda = 0;
  Param p{5};
  long k_star = 1;
  FIEProblem master_problem;
  SolutionFunction master;
  PeriodicIC ic;

  /// u_n(t) = u_N((|n| / N)^{2/mu} t).
  double mode(long n, double t) const;
};

/// Basis power used for order mu: p when mu p is a positive integer, else k / mu.
Param heatwave_power(const Param& mu, const Param& p);

/// Solves u + n^2 (T/2)^mu I^mu u = 1 on [-1, 1] (time mapped from [0, T]).
SolutionFunction solve_mode(long n, const Param& mu, double T, const HeatWaveOptions& options = {});

HeatWaveSolution solve_heatwave(const PeriodicIC& ic, const Param& mu, double T, const HeatWaveOptions& options = {});

/// u(x, t) = sum_n f_n u_n(t) e^{inx}; rows follow t_grid, columns x_grid.
Dense<double> evaluate_xt(const HeatWaveSolution& sol, const std::vector<double>& x_grid,
                          const std::vector<double>& t_grid);

}  // namespace jfp
