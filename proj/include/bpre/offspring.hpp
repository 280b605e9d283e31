#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace bpre {

// Reproduction laws live on {1,2,3,...}: no mass at zero, so the process
// never goes extinct and log m is well defined for every realization.
class OffspringLaw {
 public:
  enum class Family { ShiftedGeometric, ShiftedPoisson, FinitePMF };

  static OffspringLaw shifted_geometric(double p);
  static OffspringLaw shifted_poisson(double rate);
  // weights[k] = P(N = k+1); must be nonnegative and sum to 1 within 1e-12.
  static OffspringLaw finite_pmf(std::vector<double> weights);

  Family family() const { return family_; }
  double param() const { return param_; }
  const std::vector<double>& weights() const { return weights_; }

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double second_factorial_moment() const { return fact2_; }
  // P(N = 1); enters the harmonic-moment exponent a0.
  double prob_one() const;

  // PGF f(s) = sum_{k>=1} p_k s^k on [0,1].
  double pgf(double s) const;

  // E N^q for real q >= 0, by exact finite sums (FinitePMF) or series
  // truncated at relative tail 1e-12 (parametric families).
  double power_moment(double q) const;

  std::uint64_t sample(std::mt19937_64& rng) const;

  // Exact sample of the sum of z i.i.d. draws; nullopt signals that the
  // result would exceed the exact-integer capacity.
  std::optional<std::uint64_t> sample_sum(std::uint64_t z, std::mt19937_64& rng) const;

  bool operator==(const OffspringLaw& other) const = default;

 private:
  OffspringLaw() = default;
  Family family_ = Family::FinitePMF;
  double param_ = 0.0;              // p or rate
  std::vector<double> weights_;     // FinitePMF only
  std::vector<double> cum_weights_; // inversion table for FinitePMF
  double mean_ = 1.0;
  double variance_ = 0.0;
  double fact2_ = 0.0;
};

}  // namespace bpre
