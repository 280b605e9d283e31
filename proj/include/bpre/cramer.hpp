#pragma once

#include "bpre/environment.hpp"

namespace bpre {

// First three moments of X under the tilted measure.
struct TiltedMoments {
  double lambda = 0.0;
  double mu_lambda = 0.0;     // psi'(lambda)
  double sigma2_lambda = 0.0; // psi''(lambda)
  double rho_lambda = 0.0;    // E_lambda |X - mu_lambda|^3
};

// Computed exactly from the tilted finite mixture, not from the power series.
TiltedMoments tilted_moments(const EnvironmentModel& model, double lambda);

// Convergence-safe radius for the truncated Cramer series.
double cramer_series_radius(const CumulantSet& cum);

// Truncated Cramer series: the three printed coefficients, in t^0, t^1, t^2.
// Throws domain_error when |t| exceeds the radius (pass radius <= 0 for the
// default 0.25 / sqrt(gamma_2)).
double cramer_series(const CumulantSet& cum, double t, double radius = -1.0);

// A one-parameter exponential family seen through its cumulant generating
// function; enough structure for the saddlepoint solve.
class TiltedFamily {
 public:
  virtual ~TiltedFamily() = default;
  virtual double psi(double lambda) const = 0;
  virtual double mean(double lambda) const = 0;
  virtual double variance(double lambda) const = 0;
  virtual double lambda0() const = 0;
};

class MixtureFamily final : public TiltedFamily {
 public:
  explicit MixtureFamily(const EnvironmentModel& model) : model_(&model) {}
  double psi(double lambda) const override { return model_->log_mgf(lambda); }
  double mean(double lambda) const override;
  double variance(double lambda) const override;
  double lambda0() const override { return model_->lambda0(); }

 private:
  const EnvironmentModel* model_;
};

// Quadratic psi: all cumulants beyond the second vanish.
class GaussianFamily final : public TiltedFamily {
 public:
  GaussianFamily(double mu, double sigma2, double lambda0 = 1.0)
      : mu_(mu), sigma2_(sigma2), lambda0_(lambda0) {}
  double psi(double lambda) const override { return mu_ * lambda + 0.5 * sigma2_ * lambda * lambda; }
  double mean(double lambda) const override { return mu_ + sigma2_ * lambda; }
  double variance(double) const override { return sigma2_; }
  double lambda0() const override { return lambda0_; }

 private:
  double mu_, sigma2_, lambda0_;
};

// Solves x sigma sqrt(n) = n (mu_lambda - mu) by safeguarded Newton on the
// strictly increasing map lambda -> mu_lambda. Residual tolerance
// 1e-10 * max(1, x sigma sqrt n). Throws on regime violation or
// non-convergence after 100 iterations.
double solve_lambda(const TiltedFamily& family, double x, int n,
                    const CumulantSet* series_init = nullptr);
double solve_lambda(const EnvironmentModel& model, double x, int n);

struct Prediction {
  double x = 0.0;
  int n = 0;
  double lambda = 0.0;
  double cramer_term = 0.0;  // (x^3/sqrt n) L(x/sqrt n)
  double ratio_upper = 1.0;  // predicted P(. > x) / (1 - Phi(x))
  double ratio_lower = 1.0;  // predicted P(. < -x) / Phi(-x)
  bool normal_zone = false;  // x <= n^{1/6}
};

Prediction tail_ratio_prediction(const EnvironmentModel& model, double x, int n);

// I1 = c int_0^inf e^{-c y} (Phi(y) - 1/2) dy with c = lambda sigma_lambda
// sqrt(n), by adaptive quadrature (relative error 1e-10). sigma_lambda is a
// standard deviation.
double integral_I1(double lambda, double sigma_lambda, int n);

// |x^2/2 + n(psi(lambda) - lambda mu_lambda) - (x^3/sqrt n) L(x/sqrt n)|
// at lambda = lambda(x).
double key_identity_check(const EnvironmentModel& model, double x, int n);

}  // namespace bpre
