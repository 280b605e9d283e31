#include "bpre/wlimit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bpre/fit.hpp"
#include "bpre/quad.hpp"
#include "bpre/rng.hpp"

namespace bpre {

namespace {

constexpr double kAnalyticFloor = 1e-280;

void mean_se(const std::vector<double>& v, double& mean, double& se) {
  double sum = 0.0, sumsq = 0.0;
  for (double x : v) {
    sum += x;
    sumsq += x * x;
  }
  double m = static_cast<double>(v.size());
  mean = sum / m;
  double var = std::max(0.0, sumsq / m - mean * mean);
  se = std::sqrt(var / m);
}

// Monotone piecewise-cubic (Fritsch-Carlson) interpolant for log phi vs log t.
struct LogLogSpline {
  std::vector<double> u, y, d;

  LogLogSpline(const std::vector<double>& us, const std::vector<double>& ys) : u(us), y(ys) {
    std::size_t n = u.size();
    d.assign(n, 0.0);
    if (n < 2) return;
    std::vector<double> sec(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) sec[i] = (y[i + 1] - y[i]) / (u[i + 1] - u[i]);
    d[0] = sec[0];
    d[n - 1] = sec[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (sec[i - 1] * sec[i] <= 0.0) {
        d[i] = 0.0;
      } else {
        double w1 = 2.0 * (u[i + 1] - u[i]) + (u[i] - u[i - 1]);
        double w2 = (u[i + 1] - u[i]) + 2.0 * (u[i] - u[i - 1]);
        d[i] = (w1 + w2) / (w1 / sec[i - 1] + w2 / sec[i]);
      }
    }
  }

  double eval(double uq) const {
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(u.begin(), u.end(), uq) - u.begin());
    if (i == 0) i = 1;
    if (i >= u.size()) i = u.size() - 1;
    --i;
    double h = u[i + 1] - u[i];
    double t = (uq - u[i]) / h;
    double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    double h10 = t * (1.0 - t) * (1.0 - t);
    double h01 = t * t * (3.0 - 2.0 * t);
    double h11 = t * t * (t - 1.0);
    return h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1];
  }
};

// 1 - f(1 - delta), stable for deficits far below machine epsilon of 1.0.
double pgf_deficit(const OffspringLaw& law, double delta) {
  delta = std::clamp(delta, 0.0, 1.0);
  switch (law.family()) {
    case OffspringLaw::Family::ShiftedGeometric: {
      double p = law.param();
      return delta / (p + (1.0 - p) * delta);
    }
    case OffspringLaw::Family::ShiftedPoisson: {
      double r = law.param();
      double e = std::exp(-r * delta);
      return delta * e - std::expm1(-r * delta);
    }
    case OffspringLaw::Family::FinitePMF: {
      double acc = 0.0;
      const auto& w = law.weights();
      for (std::size_t k = 0; k < w.size(); ++k)
        if (w[k] > 0.0)
          acc += w[k] * -std::expm1(static_cast<double>(k + 1) * std::log1p(-delta));
      return acc;
    }
  }
  return delta;
}

}  // namespace

LaplaceCurve laplace_mc(const EnvironmentModel& model, const std::vector<double>& t_grid, int n,
                        std::uint64_t replications, std::uint64_t seed, unsigned workers) {
  LaplaceCurve curve;
  curve.t = t_grid;
  curve.estimator = LaplaceEstimator::MonteCarlo;
  curve.n = n;
  curve.replications = replications;
  SampleSet set = run_monte_carlo(model, n, replications, seed, workers);
  std::vector<double> w_vals;
  w_vals.reserve(set.samples.size());
  for (const auto& s : set.samples) w_vals.push_back(std::exp(s.log_w));
  std::vector<double> vals(set.samples.size());
  for (double t : t_grid) {
    for (std::size_t i = 0; i < w_vals.size(); ++i) vals[i] = std::exp(-t * w_vals[i]);
    double mean, se;
    mean_se(vals, mean, se);
    curve.phi.push_back(mean);
    curve.se.push_back(se);
  }
  return curve;
}

double laplace_quenched_recursion(const std::vector<OffspringLaw>& env_path, double t, int depth) {
  if (depth < 1) throw std::invalid_argument("laplace_quenched_recursion: depth must be >= 1");
  if (static_cast<std::size_t>(depth) > env_path.size())
    throw std::invalid_argument("laplace_quenched_recursion: path shorter than depth");
  if (t < 0.0) throw std::domain_error("laplace_quenched_recursion: t must be >= 0");
  // Argument at level j is t / Pi_j.
  std::vector<double> log_pi(static_cast<std::size_t>(depth) + 1, 0.0);
  for (int j = 0; j < depth; ++j)
    log_pi[static_cast<std::size_t>(j) + 1] =
        log_pi[static_cast<std::size_t>(j)] + std::log(env_path[static_cast<std::size_t>(j)].mean());
  // Work with the deficit 1 - s: the base argument t / Pi_depth is far below
  // the machine epsilon of 1.0 for deep recursions, so s itself would round
  // to exactly 1 and the whole curve would collapse.
  double delta = -std::expm1(-t * std::exp(-log_pi[static_cast<std::size_t>(depth)]));
  for (int j = depth - 1; j >= 0; --j)
    delta = pgf_deficit(env_path[static_cast<std::size_t>(j)], delta);
  return 1.0 - delta;
}

LaplaceCurve laplace_quenched_mc(const EnvironmentModel& model, const std::vector<double>& t_grid,
                                 int depth, std::uint64_t paths, std::uint64_t seed) {
  if (paths < 1) throw std::invalid_argument("laplace_quenched_mc: paths must be >= 1");
  LaplaceCurve curve;
  curve.t = t_grid;
  curve.estimator = LaplaceEstimator::QuenchedRecursion;
  curve.n = depth;
  curve.replications = paths;
  std::vector<std::vector<double>> vals(t_grid.size(), std::vector<double>(paths));
  std::vector<OffspringLaw> path;
  for (std::uint64_t i = 0; i < paths; ++i) {
    auto rng = make_stream(seed, i);
    path.clear();
    for (int j = 0; j < depth; ++j) path.push_back(model.atoms()[model.sample_atom(rng)].law);
    for (std::size_t k = 0; k < t_grid.size(); ++k)
      vals[k][i] = laplace_quenched_recursion(path, t_grid[k], depth);
  }
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    double mean, se;
    mean_se(vals[k], mean, se);
    curve.phi.push_back(mean);
    curve.se.push_back(se);
  }
  return curve;
}

TailFit tail_exponent_fit(const LaplaceCurve& curve) {
  std::vector<double> log_t, log_phi;
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    if (curve.t[i] <= 0.0) continue;
    double floor = std::max(3.0 * curve.se[i], kAnalyticFloor);
    if (curve.phi[i] > floor) {
      log_t.push_back(std::log(curve.t[i]));
      log_phi.push_back(std::log(curve.phi[i]));
    }
  }
  if (log_t.size() < 3)
    throw std::runtime_error("tail_exponent_fit: fewer than 3 grid points above the noise floor");
  LineFit line = least_squares(log_t, log_phi);
  TailFit fit;
  fit.exponent = -line.slope;
  fit.points_used = static_cast<int>(log_t.size());
  for (std::size_t i = 0; i < log_t.size(); ++i)
    fit.max_residual = std::max(fit.max_residual,
                                std::fabs(log_phi[i] - line.intercept - line.slope * log_t[i]));
  fit.power_law = fit.max_residual < 0.5;
  return fit;
}

HarmonicEstimate harmonic_moment(const EnvironmentModel& model, double a, int n,
                                 std::uint64_t replications, std::uint64_t seed, unsigned workers,
                                 HarmonicMethod method) {
  if (!(a >= 0.0)) throw std::domain_error("harmonic_moment: a must be >= 0");
  HarmonicEstimate est;
  est.method = method;
  est.warn_above_a0 = a >= model.a0_bound();
  if (a == 0.0) {
    est.value = 1.0;
    return est;
  }
  if (method == HarmonicMethod::Direct) {
    SampleSet set = run_monte_carlo(model, n, replications, seed, workers);
    std::vector<double> vals;
    vals.reserve(set.samples.size());
    for (const auto& s : set.samples) vals.push_back(std::exp(-a * s.log_w));
    mean_se(vals, est.value, est.se);
    return est;
  }

  // GammaIntegral route: E W^{-a} = (1/Gamma(a)) int_0^inf phi(t) t^{a-1} dt.
  std::vector<double> t_grid;
  for (int k = 0; k <= 80; ++k) t_grid.push_back(std::pow(10.0, -3.0 + 0.125 * k));  // 1e-3..1e7
  LaplaceCurve curve = laplace_mc(model, t_grid, n, replications, seed ^ 0xA5A5A5A5ULL, workers);

  // Usable window: points above the MC noise floor.
  std::vector<double> u, y, tu, se_u;
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    if (curve.phi[i] > std::max(3.0 * curve.se[i], kAnalyticFloor)) {
      u.push_back(std::log(curve.t[i]));
      y.push_back(std::log(curve.phi[i]));
      tu.push_back(curve.t[i]);
      se_u.push_back(curve.se[i]);
    }
  }
  if (u.size() < 4) throw std::runtime_error("harmonic_moment: Laplace curve below noise floor");
  LogLogSpline spline(u, y);

  double t0 = tu.front();
  double phi0 = std::exp(y.front());
  // Head: phi linear between phi(0)=1 and phi(t0).
  double integral = std::pow(t0, a) * (1.0 / a + (phi0 - 1.0) / (a + 1.0));
  // Body: adaptive quadrature of exp(y(u) + a u) du per spline interval.
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    auto f = [&](double uq) { return std::exp(spline.eval(uq) + a * uq); };
    double rough = 0.5 * (f(u[i]) + f(u[i + 1])) * (u[i + 1] - u[i]);
    integral += adaptive_simpson(f, u[i], u[i + 1], std::max(1e-12, 1e-11 * std::fabs(rough)), 24);
  }
  // Tail: fitted power law beyond the last usable point.
  std::vector<double> tail_lt, tail_lp;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (tu[i] >= tu.back() / 100.0) {
      tail_lt.push_back(u[i]);
      tail_lp.push_back(y[i]);
    }
  }
  double b = tail_lt.size() >= 2 ? -least_squares(tail_lt, tail_lp).slope : a + 1.0;
  if (b > a) {
    integral += std::exp(y.back()) * std::pow(tu.back(), a) / (b - a);
  } else {
    est.warn_above_a0 = true;  // tail decays too slowly for the requested order
  }
  double gamma_a = std::tgamma(a);
  est.value = integral / gamma_a;

  // Conservative error propagation: grid SEs treated as fully correlated.
  double se_int = 0.0;
  for (std::size_t i = 0; i + 1 < tu.size(); ++i) {
    double w = 0.5 * (std::pow(tu[i], a - 1.0) * se_u[i] + std::pow(tu[i + 1], a - 1.0) * se_u[i + 1]);
    se_int += w * (tu[i + 1] - tu[i]);
  }
  est.se = se_int / gamma_a;
  return est;
}

LpRateFit lp_rate_fit(const EnvironmentModel& model, double p, const std::vector<int>& n_grid,
                      std::uint64_t replications, std::uint64_t seed, unsigned workers, int lag) {
  (void)workers;
  if (n_grid.size() < 3) throw std::invalid_argument("lp_rate_fit: need >= 3 grid values");
  if (!(p > 1.0 && p <= 2.0)) throw std::domain_error("lp_rate_fit: p must lie in (1,2]");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()))
    throw std::invalid_argument("lp_rate_fit: n_grid must be increasing");
  int n_max = n_grid.back() + lag;

  // Coupled trajectories: one path per replication, W_n and W_{n+lag} read
  // off the same realization.
  std::vector<std::vector<double>> diffs(n_grid.size(), std::vector<double>(replications));
  for (std::uint64_t r = 0; r < replications; ++r) {
    auto rng = make_stream(seed, r);
    PopulationState state;
    double s = 0.0;
    std::vector<double> w_at(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int i = 0; i < n_max; ++i) {
      std::size_t j = model.sample_atom(rng);
      const OffspringLaw& law = model.atoms()[j].law;
      s += std::log(law.mean());
      state = step(state, law, rng);
      w_at[static_cast<std::size_t>(i) + 1] = std::exp(state.log_value() - s);
    }
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
      double wa = w_at[static_cast<std::size_t>(n_grid[k])];
      double wb = w_at[static_cast<std::size_t>(n_grid[k] + lag)];
      double d = std::fabs(wa - wb);
      // Deterministic models: the coupled values agree only up to rounding of
      // exp(log_value - s), which grows with the accumulated drift s (a few
      // e-13 by generation 60). Flush that noise; genuine coupling
      // differences on admissible grids sit orders of magnitude higher.
      if (d < 1e-11 * std::max(1.0, std::max(wa, wb))) d = 0.0;
      diffs[k][r] = std::pow(d, p);
    }
  }

  LpRateFit fit;
  std::vector<double> ns, log_norms;
  bool all_zero = true;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    double mean, se;
    mean_se(diffs[k], mean, se);
    double norm = std::pow(mean, 1.0 / p);
    fit.norms.push_back(norm);
    if (mean > 0.0) all_zero = false;
    ns.push_back(static_cast<double>(n_grid[k]));
    log_norms.push_back(std::log(std::max(norm, 1e-300)));
  }
  if (all_zero) {
    fit.exact_zero = true;
    return fit;
  }
  LineFit line = least_squares(ns, log_norms);
  fit.delta = std::exp(line.slope);
  fit.growth_flag = line.slope > 0.0;

  // Bootstrap over replications.
  auto boot_rng = make_stream(seed, 0xB007B007ULL);
  std::uniform_int_distribution<std::size_t> pick(0, static_cast<std::size_t>(replications) - 1);
  std::vector<double> deltas;
  for (int b = 0; b < 200; ++b) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(replications));
    for (auto& i : idx) i = pick(boot_rng);
    std::vector<double> boot_log(n_grid.size());
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
      double acc = 0.0;
      for (std::size_t i : idx) acc += diffs[k][i];
      acc /= static_cast<double>(replications);
      boot_log[k] = std::log(std::max(std::pow(acc, 1.0 / p), 1e-300));
    }
    deltas.push_back(std::exp(least_squares(ns, boot_log).slope));
  }
  fit.ci_lo = percentile(deltas, 0.025);
  fit.ci_hi = percentile(deltas, 0.975);
  return fit;
}

}  // namespace bpre
