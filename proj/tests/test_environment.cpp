#include <doctest.h>

#include <initializer_list>
#include <stdexcept>

#include <cmath>

#include "bpre/environment.hpp"
#include "helpers.hpp"

using namespace bpre;
using bpre::testing::two_atom_geometric;

namespace {

// Sixth-order central difference of the k-th derivative at 0, Richardson
// extrapolated once; only used as an independent oracle for the cumulants.
double fd_fourth_derivative(const EnvironmentModel& model, double h) {
  auto psi = [&](double l) { return model.log_mgf(l); };
  auto d4 = [&](double hh) {
    return (psi(-2 * hh) - 4 * psi(-hh) + 6 * psi(0.0) - 4 * psi(hh) + psi(2 * hh)) /
           (hh * hh * hh * hh);
  };
  // Error is O(h^2) for this stencil: one Richardson step with ratio 2.
  return (4.0 * d4(h / 2) - d4(h)) / 3.0;
}

}  // namespace

TEST_CASE("log_mgf reference values") {
  auto model = two_atom_geometric();
  CHECK(model.log_mgf(0.0) == doctest::Approx(0.0).epsilon(1e-14));
  double e1 = std::exp(1.0), e2 = std::exp(2.0);
  CHECK(model.log_mgf(1.0) == doctest::Approx(std::log((e1 + e2) / 2.0)).epsilon(1e-14));

  EnvironmentModel single({{OffspringLaw::shifted_geometric(std::exp(-0.7)), 1.0}});
  for (double l : {-1.0, 0.3, 2.0}) CHECK(single.log_mgf(l) == doctest::Approx(0.7 * l).epsilon(1e-12));
}

TEST_CASE("cumulants of the symmetric two-point model") {
  auto model = two_atom_geometric();
  auto cum = model.cumulants(6);
  CHECK(cum(1) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(cum(2) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(cum(3) == doctest::Approx(0.0).epsilon(1e-12));
  // X = 1.5 +- 0.5: gamma_4 = -2 c^4 with c = 0.5.
  CHECK(cum(4) == doctest::Approx(-0.125).epsilon(1e-10));
  CHECK(cum(1) == doctest::Approx(model.mu()).epsilon(1e-10));
  CHECK(cum(2) == doctest::Approx(model.sigma2()).epsilon(1e-10));
}

TEST_CASE("gamma_4 agrees with the finite-difference oracle") {
  auto model = two_atom_geometric();
  double fd = fd_fourth_derivative(model, 1e-2);
  CHECK(model.cumulants(4)(4) == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("single atom has vanishing higher cumulants") {
  EnvironmentModel single({{OffspringLaw::shifted_poisson(1.0), 1.0}});
  auto cum = single.cumulants(6);
  for (int k = 2; k <= 6; ++k) CHECK(std::fabs(cum(k)) <= 1e-12);
}

TEST_CASE("tilting") {
  auto model = two_atom_geometric();
  SUBCASE("lambda = 0 is the identity") {
    auto t = model.tilt(0.0);
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(t.atoms()[j].prob == doctest::Approx(model.atoms()[j].prob).epsilon(1e-14));
  }
  SUBCASE("lambda = 1 reweights to (1/(1+e), e/(1+e))") {
    auto t = model.tilt(1.0);
    double e1 = std::exp(1.0);
    CHECK(t.atoms()[0].prob == doctest::Approx(1.0 / (1.0 + e1)).epsilon(1e-13));
    CHECK(t.atoms()[1].prob == doctest::Approx(e1 / (1.0 + e1)).epsilon(1e-13));
  }
  SUBCASE("tilted weights are normalized") {
    for (double l : {-1.0, 0.5, model.lambda0()}) {
      double total = 0.0;
      for (const auto& a : model.tilt(l).atoms()) total += a.prob;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("tilting is a group action") {
    auto ab = model.tilt(0.3).tilt(0.45);
    auto sum = model.tilt(0.75);
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(ab.atoms()[j].prob == doctest::Approx(sum.atoms()[j].prob).epsilon(1e-12));
  }
}

TEST_CASE("a0 bound") {
  SUBCASE("no mass at one: returns lambda0") {
    EnvironmentModel model({{OffspringLaw::finite_pmf({0.0, 1.0}), 0.5},
                            {OffspringLaw::finite_pmf({0.0, 0.0, 1.0}), 0.5}});
    CHECK(model.a0_bound(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("symbolic case E p_1 = 1/2, E m = 2") {
    EnvironmentModel model({{OffspringLaw::finite_pmf({1.0}), 0.5},
                            {OffspringLaw::finite_pmf({0.0, 0.0, 1.0}), 0.5}});
    CHECK(model.a0_bound(1.0) == doctest::Approx(0.5).epsilon(1e-13));
  }
  SUBCASE("E p_1 = 1 rejected") {
    EnvironmentModel model({{OffspringLaw::finite_pmf({1.0}), 1.0}});
    CHECK_THROWS_AS(model.a0_bound(1.0), std::domain_error);
  }
}

TEST_CASE("assumption validation") {
  SUBCASE("standard model is admissible") {
    auto rep = two_atom_geometric().validate_assumptions(1.5);
    CHECK(rep.admissible());
    CHECK(rep.first_failure().empty());
  }
  SUBCASE("single atom fails non-degeneracy") {
    EnvironmentModel single({{OffspringLaw::shifted_poisson(1.0), 1.0}});
    auto rep = single.validate_assumptions(1.5);
    CHECK_FALSE(rep.nondegenerate.ok);
    CHECK(rep.first_failure().find("sigma") != std::string::npos);
  }
  SUBCASE("all mass at one fails EP_1") {
    EnvironmentModel model({{OffspringLaw::finite_pmf({1.0}), 1.0}});
    auto rep = model.validate_assumptions(1.5);
    CHECK_FALSE(rep.ep1.ok);
  }
}

TEST_CASE("log_mgf is convex along a grid") {
  auto model = two_atom_geometric();
  double lo = -1.0, hi = model.lambda0();
  double h = (hi - lo) / 20.0;
  for (int i = 1; i < 20; ++i) {
    double l = lo + i * h;
    double second = model.log_mgf(l - h) - 2.0 * model.log_mgf(l) + model.log_mgf(l + h);
    CHECK(second >= -1e-9);
  }
}

TEST_CASE("log_mgf slope at zero is gamma_1") {
  auto model = two_atom_geometric();
  double h = 1e-6;
  double fd = (model.log_mgf(h) - model.log_mgf(-h)) / (2.0 * h);
  CHECK(fd == doctest::Approx(model.cumulants(3)(1)).epsilon(1e-8));
}

TEST_CASE("tilted first cumulant matches the tilted mean") {
  auto model = two_atom_geometric();
  for (double l : {0.0, 0.1, 0.5}) {
    auto tilted = model.tilt(l);
    CHECK(tilted.cumulants(3)(1) == doctest::Approx(tilted.mu()).epsilon(1e-10));
  }
}

TEST_CASE("constructor rejects bad mixtures") {
  CHECK_THROWS_AS(EnvironmentModel({}), std::invalid_argument);
  CHECK_THROWS_AS(EnvironmentModel({{OffspringLaw::shifted_poisson(1.0), 0.7}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(EnvironmentModel({{OffspringLaw::shifted_poisson(1.0), 1.0}}, -1.0),
                  std::invalid_argument);
}
