#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpre/environment.hpp"

namespace bpre {

enum class ExperimentKind { Validate, Simulate, BeScan, CramerScan, SteinCheck, WTail };

std::string kind_name(ExperimentKind kind);

// Parse or validation failure; maps to exit code 2 in the CLI.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Validate;
  std::optional<EnvironmentModel> model;  // engaged after a successful parse
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0 = resolve from BPRE_WORKERS / hardware
  int n = 0;
  std::vector<int> n_grid;
  std::vector<double> x_grid;     // CramerScan
  std::vector<double> t_grid;     // WTail
  double p = 1.5;                 // Validate / Lp machinery
  double a = 0.0;                 // WTail harmonic exponent; 0 = a0/2 default
  std::uint64_t exact_threshold = 1ULL << 40;
  std::string config_hash;        // FNV-1a of the raw JSON text
  std::vector<std::string> defaults_used;  // "key=value" pairs recorded in output
};

// Offspring law / environment model from their JSON descriptions:
// {"family":"shifted_geometric","p":0.5}, {"family":"shifted_poisson","rate":2.0},
// {"family":"finite","pmf":{"1":0.3,"2":0.7}};
// {"atoms":[{"law":{...},"prob":0.5},...],"lambda0":1.0}.
OffspringLaw law_from_json_text(const std::string& text);
EnvironmentModel model_from_json_text(const std::string& text);

// Full config validation: mandatory fields, kind-specific parameters,
// admissibility of the model, and the CramerScan regime guard. Throws
// ConfigError naming the violated condition.
ExperimentConfig parse_config(const std::string& text, ExperimentKind kind);

std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace bpre
