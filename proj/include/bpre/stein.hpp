#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bpre/environment.hpp"

namespace bpre {

struct SteinEval {
  double x = 0.0;
  double w = 0.0;
  double f = 0.0;
  double f_prime = 0.0;
  double residual = 0.0;  // finite-difference residual when defined, else 0
};

// Bounded solution of f'(w) - w f(w) = 1(w <= x) - Phi(x), evaluated through
// the scaled complementary error function so neither branch overflows.
SteinEval stein_solution(double x, double w);

// |central difference of f - w f(w) - (1(w<=x) - Phi(x))|; the derivative
// jumps at w = x, so points within 2h of x are rejected.
double stein_residual_fd(double x, double w, double h = 1e-6);

// sup_t |F_hat(t) - Phi(t)|, attained at a jump of the empirical CDF.
double kolmogorov_distance(std::span<const double> samples);

// (1/m) sum_i [f'_x(s_i) - s_i f_x(s_i)]; equals F_hat(x) - Phi(x) samplewise.
double empirical_stein_expectation(std::span<const double> samples, double x);

struct BerryEsseenFit {
  std::vector<int> n_grid;
  std::vector<double> distances;
  std::uint64_t replications = 0;
  double slope = 0.0;      // rate: d_n ~ amplitude * n^slope
  double intercept = 0.0;  // log amplitude
  double ci_lo = 0.0;      // bootstrap 95% CI for the slope
  double ci_hi = 0.0;
};

BerryEsseenFit berry_esseen_fit(const EnvironmentModel& model, const std::vector<int>& n_grid,
                                std::uint64_t replications, std::uint64_t seed, unsigned workers,
                                int bootstrap_rounds = 100);

}  // namespace bpre
