#include <doctest.h>

#include <initializer_list>
#include <stdexcept>

#include <cmath>
#include <random>
#include <vector>

#include "bpre/normal.hpp"
#include "bpre/quad.hpp"
#include "bpre/rng.hpp"
#include "bpre/stein.hpp"
#include "helpers.hpp"

using namespace bpre;

namespace {

// Quadrature oracle: f(w) = e^{w^2/2} int_{-inf}^{w} [1(t<=x) - Phi(x)] e^{-t^2/2} dt.
double stein_f_oracle(double x, double w) {
  auto integrand = [x, w](double t) {
    double ind = t <= x ? 1.0 : 0.0;
    return (ind - norm_cdf(x)) * std::exp(0.5 * (w * w - t * t));
  };
  double lo = -30.0;
  if (x < w && x > lo) {
    return adaptive_simpson(integrand, lo, x, 1e-13) + adaptive_simpson(integrand, x, w, 1e-13);
  }
  return adaptive_simpson(integrand, lo, w, 1e-13);
}

}  // namespace

TEST_CASE("reference value at the origin") {
  auto ev = stein_solution(0.0, 0.0);
  CHECK(ev.f == doctest::Approx(kSqrt2Pi / 4.0).epsilon(1e-13));
}

TEST_CASE("matches the quadrature oracle on both branches") {
  for (auto [x, w] : {std::pair{0.0, -1.0}, {1.0, 0.0}, {0.0, 2.0}, {-1.0, 1.5}, {2.0, -2.0}}) {
    CHECK(stein_solution(x, w).f == doctest::Approx(stein_f_oracle(x, w)).epsilon(1e-9));
  }
}

TEST_CASE("f vanishes far in the left tail") {
  CHECK(std::fabs(stein_solution(0.0, -40.0).f) <= 0.05);
  CHECK(std::fabs(stein_solution(0.0, 40.0).f) <= 0.05);
}

TEST_CASE("bounds |f| <= 1 and |f'| <= 1 on the full grid") {
  for (int i = 0; i <= 160; ++i) {
    double x = -8.0 + 0.1 * i;
    for (int j = 0; j <= 160; ++j) {
      double w = -8.0 + 0.1 * j;
      auto ev = stein_solution(x, w);
      CHECK(std::fabs(ev.f) <= 1.0);
      CHECK(std::fabs(ev.f_prime) <= 1.0);
    }
  }
}

TEST_CASE("branches are continuous at w = x") {
  for (double x : {-4.0, -1.0, 0.0, 0.7, 2.5, 6.0}) {
    double left = stein_solution(x, x).f;  // w <= x branch
    double right = x >= 0.0 ? kSqrt2Pi * norm_cdf(x) * scaled_sf(x)
                            : kSqrt2Pi * norm_sf(x) * scaled_cdf(x);  // w > x limit
    CHECK(std::fabs(left - right) <= 1e-10);
  }
}

TEST_CASE("finite-difference residual is tiny off the jump") {
  CHECK(stein_residual_fd(1.0, 0.0) <= 1e-8);
  CHECK(stein_residual_fd(0.0, 3.0) <= 1e-8);
  auto rng = make_stream(314, 0);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  int checked = 0;
  while (checked < 200) {
    double x = u(rng), w = u(rng);
    if (std::fabs(w - x) <= 1e-5) continue;
    CHECK(stein_residual_fd(x, w) <= 1e-8);
    ++checked;
  }
  CHECK_THROWS_AS(stein_residual_fd(1.0, 1.0), std::domain_error);
}

TEST_CASE("Lipschitz-type bound on f'") {
  auto rng = make_stream(315, 0);
  std::uniform_real_distribution<double> uw(-4.0, 4.0);
  std::uniform_real_distribution<double> ust(-1.0, 1.0);
  for (int rep = 0; rep < 500; ++rep) {
    double x = uw(rng), w = uw(rng), s = ust(rng), t = ust(rng);
    double fs = stein_solution(x, w + s).f_prime;
    double ft = stein_solution(x, w + t).f_prime;
    double ind_s = w + s <= x ? 1.0 : 0.0;
    double ind_t = w + t <= x ? 1.0 : 0.0;
    double bound = (std::fabs(s) + std::fabs(t)) * (std::fabs(w) + 1.0) + std::fabs(ind_s - ind_t);
    CHECK(std::fabs(fs - ft) <= bound + 1e-12);
  }
}

TEST_CASE("Kolmogorov distance") {
  SUBCASE("single sample at zero") {
    std::vector<double> s = {0.0};
    CHECK(kolmogorov_distance(s) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("exact quantile grid is nearly perfect") {
    const int m = 10000;
    std::vector<double> s;
    for (int i = 1; i <= m; ++i) s.push_back(inv_norm_cdf((i - 0.5) / m));
    CHECK(kolmogorov_distance(s) <= 0.5 / m + 1e-6);
  }
  SUBCASE("degenerate sample far right") {
    std::vector<double> s(100, 10.0);
    CHECK(kolmogorov_distance(s) == doctest::Approx(norm_cdf(10.0)).epsilon(1e-12));
  }
  SUBCASE("empty input") {
    std::vector<double> s;
    CHECK_THROWS_AS(kolmogorov_distance(s), std::invalid_argument);
  }
}

TEST_CASE("empirical Stein expectation equals the CDF gap samplewise") {
  auto rng = make_stream(316, 0);
  std::normal_distribution<double> g(0.3, 1.2);
  std::vector<double> samples;
  for (int i = 0; i < 2000; ++i) samples.push_back(g(rng));
  for (double x : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
    double stein = empirical_stein_expectation(samples, x);
    std::size_t below = 0;
    for (double s : samples)
      if (s <= x) ++below;
    double gap = static_cast<double>(below) / samples.size() - norm_cdf(x);
    CHECK(std::fabs(stein - gap) <= 1e-12);
  }
}

TEST_CASE("pointwise Stein identity on a degenerate sample") {
  std::vector<double> s = {1.0};
  double x = 6.0;
  CHECK(empirical_stein_expectation(s, x) == doctest::Approx(1.0 - norm_cdf(x)).epsilon(1e-13));
}

TEST_CASE("berry_esseen_fit rejects short grids and respects the noise floor") {
  auto model = bpre::testing::two_atom_geometric();
  CHECK_THROWS_AS(berry_esseen_fit(model, {64}, 1000, 1, 0), std::invalid_argument);
  auto fit = berry_esseen_fit(model, {16, 64, 256}, 20000, 7, 0, 30);
  CHECK(fit.slope < 0.0);
  for (double d : fit.distances) CHECK(d >= 0.1 / std::sqrt(20000.0));
  CHECK(fit.ci_lo <= fit.slope);
  CHECK(fit.ci_hi >= fit.slope);
}
