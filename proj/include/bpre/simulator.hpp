#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bpre/environment.hpp"

namespace bpre {

struct SimOptions {
  std::uint64_t exact_threshold = 1ULL << 40;
  double fluctuation_cutoff = 1e12;
};

// Population size, exact-integer while it fits, log-scale afterwards.
// The Exact -> LogScale transition happens at most once per trajectory.
struct PopulationState {
  bool log_mode = false;
  std::uint64_t count = 1;
  double log_z = 0.0;
  int generation = 0;
  std::optional<int> mode_switch_generation;

  double log_value() const { return log_mode ? log_z : std::log(static_cast<double>(count)); }
};

struct TrajectorySample {
  double log_z = 0.0;   // log Z_n
  double s = 0.0;       // associated random walk S_n
  double log_w = 0.0;   // log W_n = log Z_n - S_n
  double weight = 1.0;  // importance weight (1 under the base measure)
  std::optional<int> mode_switch_generation;

  // (S_n - n mu) / (sigma sqrt n) style standardization of log Z_n.
  double standardized(double mu, double sigma, int n) const {
    return (log_z - n * mu) / (sigma * std::sqrt(static_cast<double>(n)));
  }
};

struct SampleSet {
  std::string model_tag;
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<TrajectorySample> samples;
};

PopulationState step(const PopulationState& state, const OffspringLaw& law, std::mt19937_64& rng,
                     const SimOptions& opts = {});

TrajectorySample simulate_trajectory(const EnvironmentModel& model, int n, std::mt19937_64& rng,
                                     const SimOptions& opts = {});

// Deterministic in (seed, replications) regardless of the worker count:
// replication i always consumes the stream derived from (seed, i).
SampleSet run_monte_carlo(const EnvironmentModel& model, int n, std::uint64_t replications,
                          std::uint64_t seed, unsigned workers, const SimOptions& opts = {});

struct TiltedEstimate {
  double value = 0.0;
  double se = 0.0;
};

// P(log Z_n > event_threshold) by importance sampling under the tilted
// environment; each trajectory carries weight exp(-lambda S_n + n psi(lambda)).
TiltedEstimate tilted_estimate(const EnvironmentModel& model, double lambda, int n,
                               std::uint64_t replications, double event_threshold,
                               std::uint64_t seed, unsigned workers, const SimOptions& opts = {});

unsigned resolve_workers(unsigned requested);

}  // namespace bpre
