#include "bpre/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bpre {

bool AssumptionReport::admissible() const {
  return a1.ok && a2.ok && a3.ok && a4.ok && p0_ok && supercritical.ok && nondegenerate.ok && ep1.ok;
}

std::string AssumptionReport::first_failure() const {
  if (!p0_ok) return "p0: support must exclude 0";
  if (!supercritical.ok) return "supercriticality: mu = E log m_0 must be > 0";
  if (!nondegenerate.ok) return "non-degenerate sigma^2 required";
  if (!ep1.ok) return "EP_1: E p_1(xi_0) < 1 required";
  if (!a1.ok) return "A1 fails: E X^{3+eps} diverges";
  if (!a2.ok) return "A2 fails: E (Z_1/m_0)^p diverges";
  if (!a3.ok) return "A3 fails: E m_0^{lambda_0} diverges";
  if (!a4.ok) return "A4 fails: E Z_1^p/m_0 diverges";
  return "";
}

EnvironmentModel::EnvironmentModel(std::vector<Atom> atoms, double lambda0)
    : atoms_(std::move(atoms)), lambda0_(lambda0) {
  if (atoms_.empty()) throw std::invalid_argument("EnvironmentModel: no atoms");
  if (!(lambda0_ > 0.0)) throw std::invalid_argument("EnvironmentModel: lambda0 must be > 0");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.prob > 0.0)) throw std::invalid_argument("EnvironmentModel: atom probabilities must be positive");
    total += a.prob;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("EnvironmentModel: atom probabilities must sum to 1");
  log_means_.reserve(atoms_.size());
  cum_probs_.reserve(atoms_.size());
  double cum = 0.0;
  for (const auto& a : atoms_) {
    log_means_.push_back(std::log(a.law.mean()));
    cum += a.prob;
    cum_probs_.push_back(cum);
  }
  cum_probs_.back() = 1.0;
  for (std::size_t j = 0; j < atoms_.size(); ++j) mu_ += atoms_[j].prob * log_means_[j];
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    double d = log_means_[j] - mu_;
    sigma2_ += atoms_[j].prob * d * d;
  }
}

double EnvironmentModel::mean_p1() const {
  double acc = 0.0;
  for (const auto& a : atoms_) acc += a.prob * a.law.prob_one();
  return acc;
}

double EnvironmentModel::log_mgf(double lambda) const {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < atoms_.size(); ++j)
    hi = std::max(hi, std::log(atoms_[j].prob) + lambda * log_means_[j]);
  double acc = 0.0;
  for (std::size_t j = 0; j < atoms_.size(); ++j)
    acc += std::exp(std::log(atoms_[j].prob) + lambda * log_means_[j] - hi);
  return hi + std::log(acc);
}

CumulantSet EnvironmentModel::cumulants(int K) const {
  if (K < 3) throw std::invalid_argument("cumulants: K must be >= 3");
  // Raw moments of X are exact finite sums over atoms.
  std::vector<double> raw(static_cast<std::size_t>(K) + 1, 0.0);
  raw[0] = 1.0;
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    double x = log_means_[j];
    double pw = 1.0;
    for (int k = 1; k <= K; ++k) {
      pw *= x;
      raw[static_cast<std::size_t>(k)] += atoms_[j].prob * pw;
    }
  }
  // kappa_n = m_n - sum_{k=1}^{n-1} C(n-1, k-1) kappa_k m_{n-k}
  std::vector<double> kappa(static_cast<std::size_t>(K) + 1, 0.0);
  std::vector<std::vector<double>> binom(static_cast<std::size_t>(K) + 1);
  for (int n = 0; n <= K; ++n) {
    binom[static_cast<std::size_t>(n)].assign(static_cast<std::size_t>(n) + 1, 1.0);
    for (int k = 1; k < n; ++k)
      binom[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] =
          binom[static_cast<std::size_t>(n) - 1][static_cast<std::size_t>(k) - 1] +
          binom[static_cast<std::size_t>(n) - 1][static_cast<std::size_t>(k)];
  }
  for (int n = 1; n <= K; ++n) {
    double acc = raw[static_cast<std::size_t>(n)];
    for (int k = 1; k < n; ++k)
      acc -= binom[static_cast<std::size_t>(n) - 1][static_cast<std::size_t>(k) - 1] *
             kappa[static_cast<std::size_t>(k)] * raw[static_cast<std::size_t>(n - k)];
    kappa[static_cast<std::size_t>(n)] = acc;
  }
  CumulantSet cs;
  cs.gamma.assign(kappa.begin() + 1, kappa.end());
  return cs;
}

EnvironmentModel EnvironmentModel::tilt(double lambda) const {
  double psi = log_mgf(lambda);
  std::vector<Atom> tilted = atoms_;
  for (std::size_t j = 0; j < tilted.size(); ++j)
    tilted[j].prob = std::exp(std::log(atoms_[j].prob) + lambda * log_means_[j] - psi);
  // Renormalize away the last rounding crumbs so the invariant check holds.
  double total = 0.0;
  for (const auto& a : tilted) total += a.prob;
  for (auto& a : tilted) a.prob /= total;
  return EnvironmentModel(std::move(tilted), lambda0_);
}

double EnvironmentModel::a0_bound(double lambda0) const {
  if (!(lambda0 > 0.0)) throw std::invalid_argument("a0_bound: lambda0 must be > 0");
  double ep1 = mean_p1();
  bool any_p1 = false;
  for (const auto& a : atoms_)
    if (a.law.prob_one() > 0.0) any_p1 = true;
  if (!any_p1) return lambda0;
  if (ep1 >= 1.0) throw std::domain_error("a0_bound: E p_1 = 1 contradicts non-degeneracy");
  double log_L = log_mgf(lambda0);
  return lambda0 / (1.0 - log_L / std::log(ep1));
}

AssumptionReport EnvironmentModel::validate_assumptions(double p, double epsilon) const {
  if (!(p > 1.0)) throw std::invalid_argument("validate_assumptions: p must be > 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("validate_assumptions: epsilon must be > 0");
  AssumptionReport rep;
  rep.p_used = p;
  rep.epsilon_used = epsilon;
  rep.p0_ok = true;  // laws cannot express mass at 0 by construction

  double ex3 = 0.0;
  for (std::size_t j = 0; j < atoms_.size(); ++j)
    ex3 += atoms_[j].prob * std::pow(std::fabs(log_means_[j]), 3.0 + epsilon);
  rep.a1 = {std::isfinite(ex3), ex3};

  double a2 = 0.0, a4 = 0.0;
  bool moments_ok = true;
  for (const auto& a : atoms_) {
    double enp;
    try {
      enp = a.law.power_moment(p);
    } catch (const std::runtime_error&) {
      moments_ok = false;
      enp = std::numeric_limits<double>::infinity();
    }
    double m = a.law.mean();
    a2 += a.prob * enp / std::pow(m, p);
    a4 += a.prob * enp / m;
  }
  rep.a2 = {moments_ok && std::isfinite(a2), a2};
  rep.a4 = {moments_ok && std::isfinite(a4), a4};

  double L0 = std::exp(log_mgf(lambda0_));
  rep.a3 = {std::isfinite(L0), L0};

  rep.supercritical = {mu_ > 0.0, mu_};
  rep.nondegenerate = {sigma2_ > 0.0, sigma2_};
  double ep1 = mean_p1();
  rep.ep1 = {ep1 < 1.0, ep1};
  return rep;
}

std::size_t EnvironmentModel::sample_atom(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double u = u01(rng);
  std::size_t j = 0;
  while (j + 1 < cum_probs_.size() && u > cum_probs_[j]) ++j;
  return j;
}

std::string EnvironmentModel::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& a : atoms_) {
    switch (a.law.family()) {
      case OffspringLaw::Family::ShiftedGeometric: os << "G(" << a.law.param() << ")"; break;
      case OffspringLaw::Family::ShiftedPoisson: os << "P(" << a.law.param() << ")"; break;
      case OffspringLaw::Family::FinitePMF: {
        os << "F(";
        for (double w : a.law.weights()) os << w << ",";
        os << ")";
        break;
      }
    }
    os << "*" << a.prob << ";";
  }
  os << "l0=" << lambda0_;
  return os.str();
}

}  // namespace bpre
