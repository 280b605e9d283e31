#include "bpre/harness.hpp"

#include <cmath>

#include "bpre/cramer.hpp"
#include "bpre/normal.hpp"
#include "bpre/simulator.hpp"
#include "bpre/stein.hpp"
#include "bpre/wlimit.hpp"

namespace bpre {

namespace {

const std::string kEmpty;

ResultTable base_table(const ExperimentConfig& cfg) {
  ResultTable table;
  table.config_hash = cfg.config_hash;
  table.seed = cfg.seed;
  table.notes.push_back("kind=" + kind_name(cfg.kind));
  for (const auto& d : cfg.defaults_used) table.notes.push_back("default:" + d);
  return table;
}

ResultTable run_validate(const ExperimentConfig& cfg) {
  ResultTable table = base_table(cfg);
  table.columns = {"condition", "ok", "value"};
  AssumptionReport r = cfg.model->validate_assumptions(cfg.p);
  auto row = [&](const std::string& name, bool ok, double value) {
    table.add_row({name, static_cast<std::int64_t>(ok ? 1 : 0), value});
  };
  row("A1_fractional_moment", r.a1.ok, r.a1.value);
  row("A2_normalized_moment", r.a2.ok, r.a2.value);
  row("A3_exponential_moment", r.a3.ok, r.a3.value);
  row("A4_weighted_moment", r.a4.ok, r.a4.value);
  row("no_mass_at_zero", r.p0_ok, r.p0_ok ? 1.0 : 0.0);
  row("supercritical_mu", r.supercritical.ok, r.supercritical.value);
  row("nondegenerate_sigma2", r.nondegenerate.ok, r.nondegenerate.value);
  row("mean_p1_below_one", r.ep1.ok, r.ep1.value);
  row("a0_bound", true, cfg.model->a0_bound());
  return table;
}

ResultTable run_simulate(const ExperimentConfig& cfg) {
  ResultTable table = base_table(cfg);
  table.columns = {"rep", "n", "logZ", "S", "logW", "weight", "mode_switch_gen"};
  SimOptions opts;
  opts.exact_threshold = cfg.exact_threshold;
  SampleSet set = run_monte_carlo(*cfg.model, cfg.n, cfg.replications, cfg.seed, cfg.workers, opts);
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    const auto& s = set.samples[i];
    table.add_row({static_cast<std::int64_t>(i), static_cast<std::int64_t>(cfg.n), s.log_z, s.s,
                   s.log_w, s.weight,
                   static_cast<std::int64_t>(s.mode_switch_generation.value_or(-1))});
  }
  return table;
}

ResultTable run_be_scan(const ExperimentConfig& cfg) {
  ResultTable table = base_table(cfg);
  table.columns = {"record", "n", "d_n", "replications", "slope", "intercept", "ci_lo", "ci_hi"};
  BerryEsseenFit fit =
      berry_esseen_fit(*cfg.model, cfg.n_grid, cfg.replications, cfg.seed, cfg.workers);
  for (std::size_t k = 0; k < fit.n_grid.size(); ++k) {
    table.add_row({std::string("distance"), static_cast<std::int64_t>(fit.n_grid[k]),
                   fit.distances[k], static_cast<std::int64_t>(fit.replications), kEmpty, kEmpty,
                   kEmpty, kEmpty});
  }
  table.add_row({std::string("fit"), kEmpty, kEmpty, static_cast<std::int64_t>(fit.replications),
                 fit.slope, fit.intercept, fit.ci_lo, fit.ci_hi});
  return table;
}

ResultTable run_cramer_scan(const ExperimentConfig& cfg) {
  ResultTable table = base_table(cfg);
  table.columns = {"x",       "n",         "lambda",   "cramer_term", "ratio_upper",
                   "ratio_lower", "p_direct", "se_direct", "p_tilted", "se_tilted",
                   "ratio_observed"};
  double mu = cfg.model->mu();
  double sigma = std::sqrt(cfg.model->sigma2());
  double sqrt_n = std::sqrt(static_cast<double>(cfg.n));
  SampleSet base = run_monte_carlo(*cfg.model, cfg.n, cfg.replications, cfg.seed, cfg.workers);
  for (double x : cfg.x_grid) {
    Prediction pred = tail_ratio_prediction(*cfg.model, x, cfg.n);
    double threshold = cfg.n * mu + x * sigma * sqrt_n;
    std::uint64_t hits = 0;
    for (const auto& s : base.samples)
      if (s.log_z > threshold) ++hits;
    double m = static_cast<double>(base.samples.size());
    double p_direct = static_cast<double>(hits) / m;
    double se_direct = std::sqrt(std::max(0.0, p_direct * (1.0 - p_direct)) / m);
    TiltedEstimate tilted = tilted_estimate(*cfg.model, pred.lambda, cfg.n, cfg.replications,
                                            threshold, cfg.seed + 1, cfg.workers);
    double tail = norm_sf(x);
    table.add_row({x, static_cast<std::int64_t>(cfg.n), pred.lambda, pred.cramer_term,
                   pred.ratio_upper, pred.ratio_lower, p_direct, se_direct, tilted.value,
                   tilted.se, tilted.value / tail});
  }
  return table;
}

ResultTable run_stein_check(const ExperimentConfig& cfg) {
  ResultTable table = base_table(cfg);
  table.columns = {"record", "x", "w", "f", "f_prime", "residual"};
  const double w_grid[] = {-8.0, -4.0, -2.0, -1.0, -0.25, 0.25, 1.0, 2.0, 4.0, 8.0};
  for (double x : cfg.x_grid) {
    for (double w : w_grid) {
      if (std::fabs(w - x) <= 1e-5) continue;
      SteinEval ev = stein_solution(x, w);
      table.add_row({std::string("point"), x, w, ev.f, ev.f_prime, ev.residual});
    }
  }
  // E[f'(W) - W f(W)] over standardized samples equals F_hat(x) - Phi(x).
  double mu = cfg.model->mu();
  double sigma = std::sqrt(cfg.model->sigma2());
  SampleSet set = run_monte_carlo(*cfg.model, cfg.n, cfg.replications, cfg.seed, cfg.workers);
  std::vector<double> standardized;
  standardized.reserve(set.samples.size());
  for (const auto& s : set.samples) standardized.push_back(s.standardized(mu, sigma, cfg.n));
  for (double x : cfg.x_grid) {
    double stein = empirical_stein_expectation(standardized, x);
    std::uint64_t below = 0;
    for (double s : standardized)
      if (s <= x) ++below;
    double gap = static_cast<double>(below) / static_cast<double>(standardized.size()) - norm_cdf(x);
    table.add_row({std::string("empirical"), x, kEmpty, stein, gap, std::fabs(stein - gap)});
  }
  return table;
}

ResultTable run_wtail(const ExperimentConfig& cfg) {
  ResultTable table = base_table(cfg);
  table.columns = {"record", "t",         "phi",    "se",        "estimator", "a",
                   "estimate", "est_se", "method", "warn_flag", "exponent",  "power_law",
                   "max_residual"};
  LaplaceCurve curve =
      laplace_mc(*cfg.model, cfg.t_grid, cfg.n, cfg.replications, cfg.seed, cfg.workers);
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    table.add_row({std::string("laplace"), curve.t[i], curve.phi[i], curve.se[i],
                   std::string("monte_carlo"), kEmpty, kEmpty, kEmpty, kEmpty, kEmpty, kEmpty,
                   kEmpty, kEmpty});
  }
  TailFit fit = tail_exponent_fit(curve);
  table.add_row({std::string("tail_fit"), kEmpty, kEmpty, kEmpty, kEmpty, kEmpty, kEmpty, kEmpty,
                 kEmpty, kEmpty, fit.exponent, static_cast<std::int64_t>(fit.power_law ? 1 : 0),
                 fit.max_residual});
  for (HarmonicMethod method : {HarmonicMethod::Direct, HarmonicMethod::GammaIntegral}) {
    HarmonicEstimate est = harmonic_moment(*cfg.model, cfg.a, cfg.n, cfg.replications,
                                           cfg.seed + 2, cfg.workers, method);
    table.add_row({std::string("harmonic"), kEmpty, kEmpty, kEmpty, kEmpty, cfg.a, est.value,
                   est.se,
                   std::string(method == HarmonicMethod::Direct ? "direct" : "gamma_integral"),
                   static_cast<std::int64_t>(est.warn_above_a0 ? 1 : 0), kEmpty, kEmpty, kEmpty});
  }
  return table;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::Validate: return run_validate(cfg);
    case ExperimentKind::Simulate: return run_simulate(cfg);
    case ExperimentKind::BeScan: return run_be_scan(cfg);
    case ExperimentKind::CramerScan: return run_cramer_scan(cfg);
    case ExperimentKind::SteinCheck: return run_stein_check(cfg);
    case ExperimentKind::WTail: return run_wtail(cfg);
  }
  throw std::logic_error("run_experiment: unknown experiment kind");
}

}  // namespace bpre
