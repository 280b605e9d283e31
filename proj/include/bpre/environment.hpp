#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bpre/offspring.hpp"

namespace bpre {

struct Atom {
  OffspringLaw law;
  double prob;
};

// Cumulants gamma_1..gamma_K of X = log m_0; gamma(k) is 1-based.
struct CumulantSet {
  std::vector<double> gamma;
  double operator()(int k) const { return gamma.at(static_cast<std::size_t>(k) - 1); }
  int order() const { return static_cast<int>(gamma.size()); }
};

struct AssumptionReport {
  struct Item {
    bool ok = false;
    double value = 0.0;
  };
  Item a1;              // E X^{3+eps}
  Item a2;              // E (Z_1/m_0)^p
  Item a3;              // E m_0^{lambda_0}
  Item a4;              // E Z_1^p / m_0
  bool p0_ok = true;    // structural: support is {1,2,...}
  Item supercritical;   // mu > 0
  Item nondegenerate;   // sigma^2 > 0
  Item ep1;             // E p_1(xi_0) < 1
  double epsilon_used = 1.0;
  double p_used = 1.5;

  bool admissible() const;
  // Names the first violated condition, empty if admissible.
  std::string first_failure() const;
};

// Finite mixture of offspring laws: the distribution of the per-generation
// environment. Every expectation over the environment is an exact finite sum.
class EnvironmentModel {
 public:
  EnvironmentModel(std::vector<Atom> atoms, double lambda0 = 1.0);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double lambda0() const { return lambda0_; }
  double mu() const { return mu_; }
  double sigma2() const { return sigma2_; }
  double mean_p1() const;

  // psi(lambda) = log E m_0^lambda, with log-sum-exp stabilization.
  double log_mgf(double lambda) const;

  // gamma_1..gamma_K from exact raw moments via the moment-to-cumulant
  // recursion (no numerical differentiation).
  CumulantSet cumulants(int K) const;

  // Cramer change of measure on the environment: atom j reweighted by
  // m_j^lambda / L(lambda). Offspring laws themselves are unchanged.
  EnvironmentModel tilt(double lambda) const;

  // Harmonic-moment exponent bound a_0.
  double a0_bound() const { return a0_bound(lambda0_); }
  double a0_bound(double lambda0) const;

  AssumptionReport validate_assumptions(double p = 1.5, double epsilon = 1.0) const;

  std::size_t sample_atom(std::mt19937_64& rng) const;

  // Stable identifier for sample-set provenance.
  std::string fingerprint() const;

 private:
  std::vector<Atom> atoms_;
  double lambda0_;
  std::vector<double> log_means_;
  std::vector<double> cum_probs_;
  double mu_ = 0.0;
  double sigma2_ = 0.0;
};

}  // namespace bpre
