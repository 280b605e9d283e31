#pragma once

#include "bpre/config.hpp"
#include "bpre/table.hpp"

namespace bpre {

// Runs the configured experiment and assembles its fixed-column table.
// Deterministic for fixed (config, seed) regardless of the worker count.
ResultTable run_experiment(const ExperimentConfig& config);

}  // namespace bpre
