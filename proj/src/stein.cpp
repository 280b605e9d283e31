#include "bpre/stein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bpre/fit.hpp"
#include "bpre/normal.hpp"
#include "bpre/rng.hpp"
#include "bpre/simulator.hpp"

namespace bpre {

namespace {

// f_x(w) in a branch arrangement where every exponential factor is bounded.
double stein_f(double x, double w) {
  if (w <= x) {
    if (w <= 0.0) return kSqrt2Pi * scaled_cdf(w) * norm_sf(x);
    // 0 < w <= x: e^{w^2/2}(1-Phi(x)) = scaled_sf(x) e^{(w^2-x^2)/2} <= scaled_sf(x)
    double expo = 0.5 * (w - x) * (w + x);
    return kSqrt2Pi * norm_cdf(w) * scaled_sf(x) * std::exp(expo);
  }
  if (w >= 0.0) return kSqrt2Pi * norm_cdf(x) * scaled_sf(w);
  // x < w < 0
  double expo = 0.5 * (w - x) * (w + x);
  return kSqrt2Pi * norm_sf(w) * scaled_cdf(x) * std::exp(expo);
}

}  // namespace

SteinEval stein_solution(double x, double w) {
  SteinEval ev;
  ev.x = x;
  ev.w = w;
  ev.f = stein_f(x, w);
  double indicator = w <= x ? 1.0 : 0.0;
  ev.f_prime = w * ev.f + indicator - norm_cdf(x);
  double h = 1e-6;
  ev.residual = std::fabs(w - x) > 2.0 * h ? stein_residual_fd(x, w, h) : 0.0;
  return ev;
}

double stein_residual_fd(double x, double w, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("stein_residual_fd: h must be > 0");
  if (std::fabs(w - x) <= 2.0 * h)
    throw std::domain_error("stein_residual_fd: w too close to the derivative jump at x");
  double deriv = (stein_f(x, w + h) - stein_f(x, w - h)) / (2.0 * h);
  double indicator = w <= x ? 1.0 : 0.0;
  return std::fabs(deriv - w * stein_f(x, w) - (indicator - norm_cdf(x)));
}

double kolmogorov_distance(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("kolmogorov_distance: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double cdf = norm_cdf(sorted[i]);
    double upper = static_cast<double>(i + 1) / m - cdf;  // just after the jump
    double lower = cdf - static_cast<double>(i) / m;      // just before the jump
    d = std::max({d, upper, lower});
  }
  return d;
}

double empirical_stein_expectation(std::span<const double> samples, double x) {
  if (samples.empty()) throw std::invalid_argument("empirical_stein_expectation: empty sample");
  double acc = 0.0;
  for (double s : samples) {
    SteinEval ev = stein_solution(x, s);
    acc += ev.f_prime - s * ev.f;
  }
  return acc / static_cast<double>(samples.size());
}

BerryEsseenFit berry_esseen_fit(const EnvironmentModel& model, const std::vector<int>& n_grid,
                                std::uint64_t replications, std::uint64_t seed, unsigned workers,
                                int bootstrap_rounds) {
  if (n_grid.size() < 3) throw std::invalid_argument("berry_esseen_fit: need >= 3 grid values");
  BerryEsseenFit fit;
  fit.n_grid = n_grid;
  fit.replications = replications;
  double mu = model.mu();
  double sigma = std::sqrt(model.sigma2());

  std::vector<std::vector<double>> standardized(n_grid.size());
  std::vector<double> log_n, log_d;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    int n = n_grid[k];
    std::uint64_t sub_seed = seed + static_cast<std::uint64_t>(n) * 0x9E3779B97F4A7C15ULL;
    SampleSet set = run_monte_carlo(model, n, replications, sub_seed, workers);
    auto& vals = standardized[k];
    vals.reserve(set.samples.size());
    for (const auto& t : set.samples) vals.push_back(t.standardized(mu, sigma, n));
    double d = kolmogorov_distance(vals);
    fit.distances.push_back(d);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_d.push_back(std::log(d));
  }
  LineFit line = least_squares(log_n, log_d);
  fit.slope = line.slope;
  fit.intercept = line.intercept;

  // Nonparametric bootstrap over replications, refitting the slope.
  std::vector<double> slopes;
  slopes.reserve(static_cast<std::size_t>(bootstrap_rounds));
  auto boot_rng = make_stream(seed, 0xB007B007ULL);
  std::uniform_int_distribution<std::size_t> pick(0, static_cast<std::size_t>(replications) - 1);
  std::vector<double> resampled(static_cast<std::size_t>(replications));
  for (int b = 0; b < bootstrap_rounds; ++b) {
    std::vector<double> boot_log_d;
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
      const auto& vals = standardized[k];
      for (auto& r : resampled) r = vals[pick(boot_rng)];
      boot_log_d.push_back(std::log(kolmogorov_distance(resampled)));
    }
    slopes.push_back(least_squares(log_n, boot_log_d).slope);
  }
  fit.ci_lo = percentile(slopes, 0.025);
  fit.ci_hi = percentile(slopes, 0.975);
  return fit;
}

}  // namespace bpre
