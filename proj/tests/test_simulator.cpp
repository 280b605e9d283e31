#include <doctest.h>

#include <initializer_list>
#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <map>

#include "bpre/cramer.hpp"
#include "bpre/rng.hpp"
#include "bpre/simulator.hpp"
#include "helpers.hpp"

using namespace bpre;
using bpre::testing::sample_moments;
using bpre::testing::two_atom_geometric;

namespace {

// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i; else ++j;
    double fa = static_cast<double>(i) / static_cast<double>(a.size());
    double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::fabs(fa - fb));
  }
  return d;
}

}  // namespace

TEST_CASE("step with a deterministic law doubles the count") {
  auto law = OffspringLaw::finite_pmf({0.0, 1.0});
  auto rng = make_stream(1, 0);
  PopulationState state;
  state = step(state, law, rng);
  CHECK_FALSE(state.log_mode);
  CHECK(state.count == 2);
  CHECK(state.generation == 1);
}

TEST_CASE("step preserves the mean") {
  auto law = OffspringLaw::shifted_geometric(0.4);
  auto rng = make_stream(2, 0);
  const int m = 100000;
  std::vector<double> ratios;
  for (int i = 0; i < m; ++i) {
    PopulationState state;
    state.count = 7;
    state = step(state, law, rng);
    ratios.push_back(static_cast<double>(state.count) / 7.0);
  }
  auto mom = sample_moments(ratios);
  CHECK(std::fabs(mom.mean - law.mean()) <= 5.0 * mom.se);
}

TEST_CASE("LLN regime is deterministic beyond the cutoff") {
  auto law = OffspringLaw::shifted_geometric(0.5);
  auto rng = make_stream(3, 0);
  PopulationState state;
  state.log_mode = true;
  state.log_z = 100.0;
  state = step(state, law, rng);
  CHECK(state.log_z == doctest::Approx(100.0 + std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("deterministic single-atom trajectory has W identically 1") {
  EnvironmentModel model({{OffspringLaw::finite_pmf({0.0, 1.0}), 1.0}});
  auto rng = make_stream(4, 0);
  auto t = simulate_trajectory(model, 10, rng);
  CHECK(t.log_z == doctest::Approx(10.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(t.log_w == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(t.log_z == doctest::Approx(t.s + t.log_w).epsilon(1e-15));
}

TEST_CASE("single generation of a geometric atom matches the geometric law") {
  EnvironmentModel model({{OffspringLaw::shifted_geometric(0.5), 1.0}}, 1.0);
  SampleSet set = run_monte_carlo(model, 1, 100000, 13, 1);
  std::map<std::uint64_t, double> emp;
  for (const auto& t : set.samples) {
    auto z = static_cast<std::uint64_t>(std::llround(std::exp(t.log_z)));
    emp[z] += 1e-5;
  }
  double tv = 0.0;
  double w = 0.5;
  for (std::uint64_t k = 1; k <= 40; ++k) {
    auto it = emp.find(k);
    tv += std::fabs((it == emp.end() ? 0.0 : it->second) - w);
    w *= 0.5;
  }
  CHECK(0.5 * tv <= 0.01);
}

TEST_CASE("martingale property of W_n") {
  auto model = two_atom_geometric();
  for (int n : {10, 50, 200}) {
    SampleSet set = run_monte_carlo(model, n, 100000, 21 + n, 0);
    std::vector<double> w;
    w.reserve(set.samples.size());
    for (const auto& t : set.samples) w.push_back(std::exp(t.log_w));
    auto mom = sample_moments(w);
    CHECK(std::fabs(mom.mean - 1.0) <= 5.0 * mom.se);
  }
}

TEST_CASE("run_monte_carlo is deterministic across worker counts") {
  auto model = two_atom_geometric();
  SampleSet a = run_monte_carlo(model, 30, 4000, 99, 1);
  SampleSet b = run_monte_carlo(model, 30, 4000, 99, 8);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].log_z == b.samples[i].log_z);
    CHECK(a.samples[i].s == b.samples[i].s);
  }
}

TEST_CASE("zero replications is rejected") {
  auto model = two_atom_geometric();
  CHECK_THROWS_AS(run_monte_carlo(model, 10, 0, 1, 1), std::invalid_argument);
}

TEST_CASE("disjoint seeds give the same distribution") {
  auto model = two_atom_geometric();
  const std::uint64_t m = 100000;
  SampleSet a = run_monte_carlo(model, 20, m, 1000, 0);
  SampleSet b = run_monte_carlo(model, 20, m, 2000, 0);
  std::vector<double> va, vb;
  for (const auto& t : a.samples) va.push_back(t.log_z);
  for (const auto& t : b.samples) vb.push_back(t.log_z);
  double d = ks_two_sample(va, vb);
  // alpha = 0.001 critical value for the two-sample statistic.
  double crit = 1.949 * std::sqrt(2.0 / static_cast<double>(m));
  CHECK(d <= crit);
}

TEST_CASE("mode switch does not distort the distribution") {
  auto model = two_atom_geometric();
  const std::uint64_t m = 20000;
  SimOptions low, high;
  low.exact_threshold = 1ULL << 20;
  high.exact_threshold = 1ULL << 40;
  SampleSet a = run_monte_carlo(model, 40, m, 500, 0, low);
  SampleSet b = run_monte_carlo(model, 40, m, 501, 0, high);
  std::vector<double> va, vb;
  for (const auto& t : a.samples) va.push_back(t.log_z);
  for (const auto& t : b.samples) vb.push_back(t.log_z);
  CHECK(ks_two_sample(va, vb) <= 1.949 * std::sqrt(2.0 / static_cast<double>(m)));
  // The low threshold actually switches earlier on average.
  double sa = 0.0, sb = 0.0;
  for (const auto& t : a.samples) sa += t.mode_switch_generation.value_or(99);
  for (const auto& t : b.samples) sb += t.mode_switch_generation.value_or(99);
  CHECK(sa < sb);
}

TEST_CASE("tilted drift matches the tilted mean") {
  auto model = two_atom_geometric();
  double lambda = 0.5;
  auto tilted = model.tilt(lambda);
  const int n = 50;
  SampleSet set = run_monte_carlo(tilted, n, 50000, 31, 0);
  std::vector<double> drift;
  for (const auto& t : set.samples) drift.push_back(t.s / n);
  auto mom = sample_moments(drift);
  CHECK(std::fabs(mom.mean - tilted.mu()) <= 5.0 * mom.se);
}

TEST_CASE("importance weights have mean one") {
  auto model = two_atom_geometric();
  double lambda = 0.5;
  double psi = model.log_mgf(lambda);
  const int n = 50;
  SampleSet set = run_monte_carlo(model.tilt(lambda), n, 100000, 37, 0);
  std::vector<double> weights;
  for (const auto& t : set.samples) weights.push_back(std::exp(-lambda * t.s + n * psi));
  auto mom = sample_moments(weights);
  CHECK(std::fabs(mom.mean - 1.0) <= 5.0 * mom.se);
}

TEST_CASE("tilted estimate at lambda 0 reduces to direct Monte Carlo") {
  auto model = two_atom_geometric();
  const int n = 30;
  double threshold = n * model.mu();
  TiltedEstimate t0 = tilted_estimate(model, 0.0, n, 20000, threshold, 41, 0);
  SampleSet set = run_monte_carlo(model, n, 20000, 41, 0);
  double direct = 0.0;
  for (const auto& t : set.samples)
    if (t.log_z > threshold) direct += 1.0 / 20000.0;
  CHECK(t0.value == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("tilted and direct tail estimates agree at x = 2") {
  auto model = two_atom_geometric();
  const int n = 100;
  double x = 2.0;
  double sigma = std::sqrt(model.sigma2());
  double threshold = n * model.mu() + x * sigma * std::sqrt(static_cast<double>(n));
  double lambda = solve_lambda(model, x, n);
  TiltedEstimate tilted = tilted_estimate(model, lambda, n, 100000, threshold, 43, 0);
  SampleSet set = run_monte_carlo(model, n, 1000000, 44, 0);
  std::uint64_t hits = 0;
  for (const auto& t : set.samples)
    if (t.log_z > threshold) ++hits;
  double p = static_cast<double>(hits) / 1e6;
  double se_direct = std::sqrt(p * (1.0 - p) / 1e6);
  double combined = 3.0 * std::sqrt(se_direct * se_direct + tilted.se * tilted.se);
  CHECK(std::fabs(tilted.value - p) <= combined);
}
