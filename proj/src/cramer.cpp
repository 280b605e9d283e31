#include "bpre/cramer.hpp"

#include <cmath>
#include <stdexcept>

#include "bpre/normal.hpp"
#include "bpre/quad.hpp"

namespace bpre {

TiltedMoments tilted_moments(const EnvironmentModel& model, double lambda) {
  EnvironmentModel tilted = model.tilt(lambda);
  TiltedMoments tm;
  tm.lambda = lambda;
  tm.mu_lambda = tilted.mu();
  tm.sigma2_lambda = tilted.sigma2();
  double rho = 0.0;
  for (const auto& a : tilted.atoms()) {
    double d = std::log(a.law.mean()) - tm.mu_lambda;
    rho += a.prob * std::fabs(d) * d * d;
  }
  tm.rho_lambda = rho;
  return tm;
}

double cramer_series_radius(const CumulantSet& cum) {
  return 0.25 / std::sqrt(cum(2));
}

double cramer_series(const CumulantSet& cum, double t, double radius) {
  if (cum.order() < 5) throw std::invalid_argument("cramer_series: needs cumulants up to order 5");
  if (radius <= 0.0) radius = cramer_series_radius(cum);
  if (std::fabs(t) > radius) throw std::domain_error("cramer_series: |t| exceeds convergence-safe radius");
  double g2 = cum(2), g3 = cum(3), g4 = cum(4), g5 = cum(5);
  double c0 = g3 / (6.0 * std::pow(g2, 1.5));
  double c1 = (g4 * g2 - 3.0 * g3 * g3) / (24.0 * std::pow(g2, 3.0));
  double c2 = (g5 * g2 * g2 - 10.0 * g4 * g3 * g2 + 15.0 * g3 * g3 * g3) / (120.0 * std::pow(g2, 4.5));
  return c0 + c1 * t + c2 * t * t;
}

double MixtureFamily::mean(double lambda) const { return model_->tilt(lambda).mu(); }
double MixtureFamily::variance(double lambda) const { return model_->tilt(lambda).sigma2(); }

double solve_lambda(const TiltedFamily& family, double x, int n, const CumulantSet* series_init) {
  if (x < 0.0) throw std::domain_error("solve_lambda: x must be >= 0");
  if (n < 1) throw std::invalid_argument("solve_lambda: n must be >= 1");
  double mu = family.mean(0.0);
  double sigma = std::sqrt(family.variance(0.0));
  double sqrt_n = std::sqrt(static_cast<double>(n));
  double guard = 0.5 * sqrt_n * family.lambda0() * sigma;
  if (x > guard) throw std::domain_error("solve_lambda: x outside the x = o(sqrt n) regime guard");
  if (x == 0.0) return 0.0;

  double target = x * sigma / sqrt_n;  // mu_lambda - mu
  double scale = x * sigma * sqrt_n;
  double tol = 1e-10 * std::max(1.0, scale);

  // Series initializer (leading terms of the lambda(x) expansion).
  double t = x / sqrt_n;
  double lambda;
  if (series_init && series_init->order() >= 4) {
    double g2 = (*series_init)(2), g3 = (*series_init)(3), g4 = (*series_init)(4);
    lambda = t / std::sqrt(g2) - g3 / (2.0 * g2 * g2) * t * t -
             (g4 * g2 - 3.0 * g3 * g3) / (6.0 * std::pow(g2, 3.5)) * t * t * t;
  } else {
    lambda = t / sigma;
  }

  double lo = 0.0, hi = family.lambda0();
  while (family.mean(hi) - mu < target) {
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("solve_lambda: failed to bracket the root");
  }
  if (!(lambda > lo && lambda < hi)) lambda = 0.5 * (lo + hi);

  for (int iter = 0; iter < 100; ++iter) {
    double g = family.mean(lambda) - mu - target;
    if (std::fabs(g) * n <= tol) return lambda;
    if (g > 0.0) hi = lambda; else lo = lambda;
    double deriv = family.variance(lambda);
    double next = lambda - g / deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    lambda = next;
  }
  double g = family.mean(lambda) - mu - target;
  if (std::fabs(g) * n <= tol) return lambda;
  throw std::runtime_error("solve_lambda: no convergence after 100 iterations");
}

double solve_lambda(const EnvironmentModel& model, double x, int n) {
  MixtureFamily family(model);
  CumulantSet cum = model.cumulants(6);
  return solve_lambda(family, x, n, &cum);
}

Prediction tail_ratio_prediction(const EnvironmentModel& model, double x, int n) {
  if (x < 0.0) throw std::domain_error("tail_ratio_prediction: x must be >= 0");
  Prediction pred;
  pred.x = x;
  pred.n = n;
  pred.lambda = solve_lambda(model, x, n);
  pred.normal_zone = x <= std::pow(static_cast<double>(n), 1.0 / 6.0);
  if (x == 0.0) return pred;
  CumulantSet cum = model.cumulants(6);
  double t = x / std::sqrt(static_cast<double>(n));
  double x3n = x * x * x / std::sqrt(static_cast<double>(n));
  pred.cramer_term = x3n * cramer_series(cum, t);
  pred.ratio_upper = std::exp(pred.cramer_term);
  pred.ratio_lower = std::exp(-x3n * cramer_series(cum, -t));
  return pred;
}

double integral_I1(double lambda, double sigma_lambda, int n) {
  if (!(lambda > 0.0)) throw std::domain_error("integral_I1: lambda must be > 0");
  double c = lambda * sigma_lambda * std::sqrt(static_cast<double>(n));
  // Substitute u = c y: I1 = int_0^inf e^{-u} (Phi(u/c) - 1/2) du.
  auto integrand = [c](double u) { return std::exp(-u) * (norm_cdf(u / c) - 0.5); };
  double v = adaptive_simpson(integrand, 0.0, 40.0, 1e-13) +
             adaptive_simpson(integrand, 40.0, 80.0, 1e-15);
  return v;
}

double key_identity_check(const EnvironmentModel& model, double x, int n) {
  double lambda = solve_lambda(model, x, n);
  MixtureFamily family(model);
  double left = 0.5 * x * x + n * (family.psi(lambda) - lambda * family.mean(lambda));
  double t = x / std::sqrt(static_cast<double>(n));
  double right = x == 0.0 ? 0.0
                          : x * x * x / std::sqrt(static_cast<double>(n)) *
                                cramer_series(model.cumulants(6), t);
  return std::fabs(left - right);
}

}  // namespace bpre
