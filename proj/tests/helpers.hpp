#pragma once

#include <cmath>
#include <vector>

#include "bpre/environment.hpp"

namespace bpre::testing {

// Standard test model: two shifted-geometric atoms with means e and e^2,
// equiprobable. X = log m_0 is the symmetric two-point {1, 2}.
inline EnvironmentModel two_atom_geometric(double lambda0 = 1.0) {
  double e1 = std::exp(1.0), e2 = std::exp(2.0);
  return EnvironmentModel({{OffspringLaw::shifted_geometric(1.0 / e1), 0.5},
                           {OffspringLaw::shifted_geometric(1.0 / e2), 0.5}},
                          lambda0);
}

// W is identically 1: every individual has exactly two children.
inline EnvironmentModel deterministic_pair() {
  std::vector<double> w2 = {0.0, 1.0};  // P(N=2)=1
  std::vector<double> w3 = {0.0, 0.0, 1.0};  // P(N=3)=1
  return EnvironmentModel({{OffspringLaw::finite_pmf(w2), 0.5},
                           {OffspringLaw::finite_pmf(w3), 0.5}});
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

inline Moments sample_moments(const std::vector<double>& v) {
  double sum = 0.0, sumsq = 0.0;
  for (double x : v) {
    sum += x;
    sumsq += x * x;
  }
  double m = static_cast<double>(v.size());
  double mean = sum / m;
  double var = std::max(0.0, sumsq / m - mean * mean);
  return {mean, std::sqrt(var / m)};
}

}  // namespace bpre::testing
