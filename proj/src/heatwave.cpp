#include "jfp/heatwave.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jfp/errors.hpp"

namespace jfp {

std::complex<double> PeriodicIC::coeff(long n) const {
  if (n < -N_f || n > N_f) return 0.0;
  return coeffs[static_cast<std::size_t>(n + N_f)];
}

double PeriodicIC::value(double x) const {
  double s = coeff(0).real();
  for (long n = 1; n <= N_f; ++n) s += 2 * (coeff(n) * std::polar(1.0, n * x)).real();
  return s;
}

double PeriodicIC::energy() const {
  double s = 0;
  for (const auto& c : coeffs) s += std::norm(c);
  return s;
}

std::vector<double> sample_periodic(const std::function<double(double)>& f, std::size_t m) {
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = f(2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m));
  return out;
}

PeriodicIC fourier_decompose(const std::vector<double>& samples, double tol) {
  std::size_t m = samples.size();
  if (m < 4 || (m & (m - 1)) != 0) throw DomainError(fmt::format("grid size must be a power of two >= 4, got {}", m));
  if (!(tol > 0)) throw DomainError("Fourier tolerance must be positive");
  std::vector<double> in = samples;
  std::size_t half = m / 2 + 1;
  auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half));
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.data(), out, FFTW_ESTIMATE);
  fftw_execute(plan);
  std::vector<std::complex<double>> f(half);
  for (std::size_t k = 0; k < half; ++k) f[k] = std::complex<double>(out[k][0], out[k][1]) / static_cast<double>(m);
  fftw_destroy_plan(plan);
  fftw_free(out);

  double peak = 0;
  for (const auto& c : f) peak = std::max(peak, std::abs(c));
  std::size_t nf = half;
  while (nf > 0 && std::abs(f[nf - 1]) < tol * peak) --nf;
  if (nf > m / 4)
    throw ConvergenceError(
        fmt::format("Fourier coefficients do not decay below {} within |n| <= {} (grid {})", tol, m / 4, m));
  PeriodicIC ic;
  ic.N_f = static_cast<long>(nf);
  ic.tol = tol;
  ic.grid_size = m;
  ic.coeffs.resize(2 * nf + 1);
  for (long n = -ic.N_f; n <= ic.N_f; ++n) {
    std::complex<double> c = n < static_cast<long>(half) ? f[static_cast<std::size_t>(std::abs(n))] : 0.0;
    ic.coeffs[static_cast<std::size_t>(n + ic.N_f)] = n < 0 ? std::conj(c) : c;
  }
  return ic;
}

Param heatwave_power(const Param& mu, const Param& p) {
  if (!(Param(0) < mu) || Param(2) < mu) throw DomainError("heat/wave order must lie in (0, 2], got " + mu.str());
  if (!(Param(0) < p)) throw DomainError("power p must be positive, got " + p.str());
  Param k = mu * p;
  if (k.is_integer()) return p;
  long kk = static_cast<long>(std::ceil(k.to_double()));
  return Param(kk) / mu;
}

namespace {

BasisSelection mode_basis(const FIEProblem& problem, const Param& mu, const Param& p) {
  BasisOverrides o;
  o.k_star = (mu * heatwave_power(mu, p)).to_integer();
  return select_basis(problem, o);
}

SolutionFunction solve_master(const FIEProblem& problem, const BasisSelection& basis, const HeatWaveOptions& options) {
  SolveOptions so;
  so.delta = options.delta;
  so.n_max = options.n_max;
  return options.n ? solve(problem, basis, options.n, so) : solve_auto(problem, basis, so);
}

double mode_lambda(long n, const Param& mu, double T) {
  return static_cast<double>(n) * static_cast<double>(n) * std::pow(T / 2, mu.to_double());
}

}  // namespace

SolutionFunction solve_mode(long n, const Param& mu, double T, const HeatWaveOptions& options) {
  if (!(T > 0)) throw DomainError("final time must be positive");
  heatwave_power(mu, options.p);
  FIEProblem problem = mittag_leffler_problem(mu, fmt::format("{:.17g}", mode_lambda(n, mu, T)));
  return solve_master(problem, mode_basis(problem, mu, options.p), options);
}

HeatWaveSolution solve_heatwave(const PeriodicIC& ic, const Param& mu, double T, const HeatWaveOptions& options) {
  if (!(T > 0)) throw DomainError("final time must be positive");
  HeatWaveSolution sol;
  sol.mu = mu;
  sol.T = T;
  sol.N = ic.N_f;
  sol.ic = ic;
  sol.p = heatwave_power(mu, options.p);
  sol.k_star = (mu * sol.p).to_integer();
  sol.lambda = mode_lambda(ic.N_f, mu, T);
  sol.master_problem = mittag_leffler_problem(mu, fmt::format("{:.17g}", sol.lambda));
  sol.master = solve_master(sol.master_problem, mode_basis(sol.master_problem, mu, options.p), options);
  return sol;
}

double HeatWaveSolution::mode(long n, double t) const {
  if (t < 0 || t > T) throw DomainError(fmt::format("time {} outside [0, {}]", t, T));
  long a = std::abs(n);
  if (a > N) throw DomainError(fmt::format("mode {} exceeds the master mode {}", n, N));
  if (a == 0) return 1.0;
  double scale = std::pow(static_cast<double>(a) / static_cast<double>(N), 2 / mu.to_double());
  return solution_value_offset(master, std::min(2.0, 2 * scale * t / T));
}

Dense<double> evaluate_xt(const HeatWaveSolution& sol, const std::vector<double>& x_grid,
                          const std::vector<double>& t_grid) {
  Dense<double> out(t_grid.size(), x_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    std::vector<double> modes(static_cast<std::size_t>(sol.N) + 1);
    for (long n = 0; n <= sol.N; ++n) modes[static_cast<std::size_t>(n)] = sol.mode(n, t_grid[i]);
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
      double s = sol.ic.coeff(0).real();
      for (long n = 1; n <= sol.N; ++n)
        s += 2 * modes[static_cast<std::size_t>(n)] * (sol.ic.coeff(n) * std::polar(1.0, n * x_grid[j])).real();
      out(i, j) = s;
    }
  }
  return out;
}

}  // namespace jfp
