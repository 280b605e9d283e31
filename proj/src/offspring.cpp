#include "bpre/offspring.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bpre {

namespace {
constexpr std::uint64_t kExactCapacity = 1ULL << 62;
constexpr std::uint64_t kFinitePerDrawLimit = 64;  // below this, draw one by one
}  // namespace

OffspringLaw OffspringLaw::shifted_geometric(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("shifted_geometric: p must be in (0,1]");
  OffspringLaw law;
  law.family_ = Family::ShiftedGeometric;
  law.param_ = p;
  law.mean_ = 1.0 / p;
  law.variance_ = (1.0 - p) / (p * p);
  law.fact2_ = 2.0 * (1.0 - p) / (p * p);
  return law;
}

OffspringLaw OffspringLaw::shifted_poisson(double rate) {
  if (!(rate >= 0.0)) throw std::invalid_argument("shifted_poisson: rate must be >= 0");
  OffspringLaw law;
  law.family_ = Family::ShiftedPoisson;
  law.param_ = rate;
  law.mean_ = 1.0 + rate;
  law.variance_ = rate;
  law.fact2_ = rate * rate + 2.0 * rate;
  return law;
}

OffspringLaw OffspringLaw::finite_pmf(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("finite_pmf: empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("finite_pmf: negative weight");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw std::invalid_argument("finite_pmf: weights must sum to 1");
  OffspringLaw law;
  law.family_ = Family::FinitePMF;
  law.weights_ = std::move(weights);
  law.cum_weights_.resize(law.weights_.size());
  std::partial_sum(law.weights_.begin(), law.weights_.end(), law.cum_weights_.begin());
  law.cum_weights_.back() = 1.0;
  double m = 0.0, m2 = 0.0, f2 = 0.0;
  for (std::size_t k = 0; k < law.weights_.size(); ++k) {
    double v = static_cast<double>(k + 1);
    m += v * law.weights_[k];
    m2 += v * v * law.weights_[k];
    f2 += v * (v - 1.0) * law.weights_[k];
  }
  law.mean_ = m;
  law.variance_ = m2 - m * m;
  law.fact2_ = f2;
  return law;
}

double OffspringLaw::prob_one() const {
  switch (family_) {
    case Family::ShiftedGeometric: return param_;
    case Family::ShiftedPoisson: return std::exp(-param_);
    case Family::FinitePMF: return weights_[0];
  }
  return 0.0;
}

double OffspringLaw::pgf(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("pgf: s must be in [0,1]");
  switch (family_) {
    case Family::ShiftedGeometric:
      return param_ * s / (1.0 - (1.0 - param_) * s);
    case Family::ShiftedPoisson:
      return s * std::exp(param_ * (s - 1.0));
    case Family::FinitePMF: {
      // Horner on sum_k w_k s^{k+1}
      double acc = 0.0;
      for (auto it = weights_.rbegin(); it != weights_.rend(); ++it) acc = acc * s + *it;
      return acc * s;
    }
  }
  return 0.0;
}

double OffspringLaw::power_moment(double q) const {
  if (!(q >= 0.0)) throw std::domain_error("power_moment: q must be >= 0");
  switch (family_) {
    case Family::FinitePMF: {
      double acc = 0.0;
      for (std::size_t k = 0; k < weights_.size(); ++k)
        acc += std::pow(static_cast<double>(k + 1), q) * weights_[k];
      return acc;
    }
    case Family::ShiftedGeometric: {
      double p = param_, r = 1.0 - p;
      double weight = p, sum = 0.0;
      for (std::uint64_t k = 1;; ++k) {
        double term = std::pow(static_cast<double>(k), q) * weight;
        sum += term;
        weight *= r;
        if (k > 16 && term < 1e-16 * sum) break;
        if (k > 100000000ULL) throw std::runtime_error("power_moment: series did not converge");
      }
      return sum;
    }
    case Family::ShiftedPoisson: {
      double r = param_;
      double weight = std::exp(-r), sum = 0.0;
      for (std::uint64_t j = 0;; ++j) {
        double term = std::pow(static_cast<double>(j + 1), q) * weight;
        sum += term;
        weight *= r / static_cast<double>(j + 1);
        if (static_cast<double>(j) > 4.0 * r + 16.0 && term < 1e-16 * sum) break;
        if (j > 100000000ULL) throw std::runtime_error("power_moment: series did not converge");
      }
      return sum;
    }
  }
  return 0.0;
}

std::uint64_t OffspringLaw::sample(std::mt19937_64& rng) const {
  switch (family_) {
    case Family::ShiftedGeometric: {
      std::geometric_distribution<std::uint64_t> g(param_);
      return 1 + g(rng);
    }
    case Family::ShiftedPoisson: {
      std::poisson_distribution<std::uint64_t> pois(param_);
      return 1 + pois(rng);
    }
    case Family::FinitePMF: {
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      double u = u01(rng);
      std::size_t k = 0;
      while (k + 1 < cum_weights_.size() && u > cum_weights_[k]) ++k;
      return k + 1;
    }
  }
  return 1;
}

std::optional<std::uint64_t> OffspringLaw::sample_sum(std::uint64_t z, std::mt19937_64& rng) const {
  if (z == 0) throw std::invalid_argument("sample_sum: z must be >= 1");
  std::uint64_t result = 0;
  switch (family_) {
    case Family::ShiftedGeometric: {
      // Sum of z geometrics on {1,2,...} = z + NegativeBinomial(z, p).
      std::negative_binomial_distribution<std::uint64_t> nb(z, param_);
      std::uint64_t extra = nb(rng);
      if (extra > kExactCapacity - z) return std::nullopt;
      result = z + extra;
      break;
    }
    case Family::ShiftedPoisson: {
      // Sum of z shifted Poissons = z + Poisson(z * rate).
      if (param_ == 0.0) { result = z; break; }
      std::poisson_distribution<std::uint64_t> pois(static_cast<double>(z) * param_);
      std::uint64_t extra = pois(rng);
      if (extra > kExactCapacity - z) return std::nullopt;
      result = z + extra;
      break;
    }
    case Family::FinitePMF: {
      if (z <= kFinitePerDrawLimit) {
        for (std::uint64_t i = 0; i < z; ++i) result += sample(rng);
      } else {
        // Multinomial category counts by sequential binomial splitting, then
        // a weighted sum: O(K) instead of O(z).
        std::uint64_t remaining = z;
        double mass = 1.0;
        unsigned __int128 total = 0;
        for (std::size_t k = 0; k + 1 < weights_.size() && remaining > 0; ++k) {
          double p = weights_[k] / mass;
          std::uint64_t cnt;
          if (p >= 1.0) {
            cnt = remaining;
          } else {
            std::binomial_distribution<std::uint64_t> bin(remaining, p);
            cnt = bin(rng);
          }
          total += static_cast<unsigned __int128>(cnt) * (k + 1);
          remaining -= cnt;
          mass -= weights_[k];
        }
        total += static_cast<unsigned __int128>(remaining) * weights_.size();
        if (total > kExactCapacity) return std::nullopt;
        result = static_cast<std::uint64_t>(total);
      }
      break;
    }
  }
  if (result > kExactCapacity) return std::nullopt;
  return result;
}

}  // namespace bpre
