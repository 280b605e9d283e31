#pragma once

#include <cstdint>
#include <vector>

#include "bpre/environment.hpp"
#include "bpre/simulator.hpp"

namespace bpre {

enum class LaplaceEstimator { MonteCarlo, QuenchedRecursion };

struct LaplaceCurve {
  std::vector<double> t;
  std::vector<double> phi;
  std::vector<double> se;
  LaplaceEstimator estimator = LaplaceEstimator::MonteCarlo;
  int n = 0;                       // W proxied by W_n
  std::uint64_t replications = 0;
};

// phi_hat(t) = mean over replications of exp(-t W_n).
LaplaceCurve laplace_mc(const EnvironmentModel& model, const std::vector<double>& t_grid, int n,
                        std::uint64_t replications, std::uint64_t seed, unsigned workers);

// Quenched functional recursion phi_xi(t) = f_0(phi_{T xi}(t / m_0)) for a
// fixed environment path, terminal condition e^{-s} at the base.
double laplace_quenched_recursion(const std::vector<OffspringLaw>& env_path, double t, int depth);

// Annealed curve by averaging the quenched recursion over sampled paths.
LaplaceCurve laplace_quenched_mc(const EnvironmentModel& model, const std::vector<double>& t_grid,
                                 int depth, std::uint64_t paths, std::uint64_t seed);

struct TailFit {
  double exponent = 0.0;     // -slope of log phi vs log t
  bool power_law = false;    // false when residuals flag super-polynomial decay
  double max_residual = 0.0;
  int points_used = 0;
};

// Least-squares power-law fit over the grid points above the MC noise floor.
TailFit tail_exponent_fit(const LaplaceCurve& curve);

enum class HarmonicMethod { Direct, GammaIntegral };

struct HarmonicEstimate {
  double value = 0.0;
  double se = 0.0;
  HarmonicMethod method = HarmonicMethod::Direct;
  bool warn_above_a0 = false;
};

// E W^{-a}: Direct = mean of W_n^{-a}; GammaIntegral = quadrature of
// (1/Gamma(a)) int phi(t) t^{a-1} dt over an MC Laplace curve with log-log
// interpolation and a fitted power-law tail.
HarmonicEstimate harmonic_moment(const EnvironmentModel& model, double a, int n,
                                 std::uint64_t replications, std::uint64_t seed, unsigned workers,
                                 HarmonicMethod method);

struct LpRateFit {
  double delta = 0.0;   // fitted geometric rate
  double ci_lo = 0.0;   // bootstrap 95% CI
  double ci_hi = 0.0;
  bool exact_zero = false;   // deterministic model: all differences vanish
  bool growth_flag = false;  // positive slope, assumption-violation diagnostic
  std::vector<double> norms; // (E|W_n - W_{n+lag}|^p)^{1/p} per grid point
};

// Proxies E|W_n - W|^p by E|W_n - W_{n+lag}|^p on coupled trajectories.
LpRateFit lp_rate_fit(const EnvironmentModel& model, double p, const std::vector<int>& n_grid,
                      std::uint64_t replications, std::uint64_t seed, unsigned workers,
                      int lag = 20);

}  // namespace bpre
