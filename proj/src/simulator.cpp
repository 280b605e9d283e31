#include "bpre/simulator.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "bpre/rng.hpp"

namespace bpre {

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

PopulationState step(const PopulationState& state, const OffspringLaw& law, std::mt19937_64& rng,
                     const SimOptions& opts) {
  PopulationState next = state;
  next.generation = state.generation + 1;
  if (!state.log_mode) {
    auto drawn = law.sample_sum(state.count, rng);
    if (drawn && *drawn <= opts.exact_threshold) {
      next.count = *drawn;
      return next;
    }
    next.log_mode = true;
    next.mode_switch_generation = next.generation;
    if (drawn) {
      next.log_z = std::log(static_cast<double>(*drawn));
      next.count = 0;
      return next;
    }
    // Overflow mid-sample: redo this generation on the log scale.
    next.log_z = std::log(static_cast<double>(state.count));
    next.count = 0;
  }
  double log_m = std::log(law.mean());
  if (next.log_z >= std::log(opts.fluctuation_cutoff)) {
    // LLN regime: fluctuations below double-precision relevance.
    next.log_z += log_m;
  } else {
    std::normal_distribution<double> g(0.0, std::sqrt(law.variance()));
    double z = std::exp(std::min(next.log_z, std::log(opts.fluctuation_cutoff)));
    next.log_z += log_m + g(rng) / std::sqrt(z);
  }
  return next;
}

TrajectorySample simulate_trajectory(const EnvironmentModel& model, int n, std::mt19937_64& rng,
                                     const SimOptions& opts) {
  if (n < 1) throw std::invalid_argument("simulate_trajectory: n must be >= 1");
  PopulationState state;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    std::size_t j = model.sample_atom(rng);
    const OffspringLaw& law = model.atoms()[j].law;
    s += std::log(law.mean());
    state = step(state, law, rng, opts);
  }
  TrajectorySample out;
  out.log_z = state.log_value();
  out.s = s;
  out.log_w = out.log_z - s;
  out.weight = 1.0;
  out.mode_switch_generation = state.mode_switch_generation;
  return out;
}

SampleSet run_monte_carlo(const EnvironmentModel& model, int n, std::uint64_t replications,
                          std::uint64_t seed, unsigned workers, const SimOptions& opts) {
  if (replications < 1) throw std::invalid_argument("run_monte_carlo: replications must be >= 1");
  SampleSet set;
  set.model_tag = model.fingerprint();
  set.n = n;
  set.seed = seed;
  set.samples.resize(replications);
  unsigned w = resolve_workers(workers);
  if (w > replications) w = static_cast<unsigned>(replications);

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      auto rng = make_stream(seed, i);
      set.samples[i] = simulate_trajectory(model, n, rng, opts);
    }
  };
  if (w <= 1) {
    work(0, replications);
  } else {
    std::vector<std::thread> threads;
    std::uint64_t chunk = (replications + w - 1) / w;
    for (unsigned t = 0; t < w; ++t) {
      std::uint64_t begin = t * chunk;
      std::uint64_t end = std::min(replications, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(work, begin, end);
    }
    for (auto& th : threads) th.join();
  }
  return set;
}

TiltedEstimate tilted_estimate(const EnvironmentModel& model, double lambda, int n,
                               std::uint64_t replications, double event_threshold,
                               std::uint64_t seed, unsigned workers, const SimOptions& opts) {
  if (!(lambda >= 0.0 && lambda <= model.lambda0()))
    throw std::domain_error("tilted_estimate: lambda must lie in [0, lambda0]");
  EnvironmentModel tilted = model.tilt(lambda);
  double psi = model.log_mgf(lambda);
  SampleSet set = run_monte_carlo(tilted, n, replications, seed, workers, opts);
  double sum = 0.0, sumsq = 0.0;
  for (const auto& t : set.samples) {
    double weight = std::exp(-lambda * t.s + n * psi);
    double v = t.log_z > event_threshold ? weight : 0.0;
    sum += v;
    sumsq += v * v;
  }
  double m = static_cast<double>(replications);
  double mean = sum / m;
  double var = std::max(0.0, sumsq / m - mean * mean);
  return {mean, std::sqrt(var / m)};
}

}  // namespace bpre
