#pragma once

#include "tetd/harness/config.hpp"
#include "tetd/run_record.hpp"

namespace tetd {

// One grid point: everything but the seed.
struct RunPoint {
  AgentConfig agent;     // learning rate already set
  double target = 0.0;   // pi(dashed) for prediction, tau for control; unused for cartpole
  double alpha = 0.0;
  std::string group;        // point id without the learning rate
  std::string fingerprint;  // group + alpha
};

std::vector<RunPoint> expand_points(const ExperimentConfig& config);

// Executes one (point, seed) run according to the config's environment and
// setting.
RunRecord execute_run(const ExperimentConfig& config, const RunPoint& point, std::uint64_t seed);

struct SweepResult {
  std::string manifest_path;
  int executed = 0;
  int skipped = 0;  // outputs already present (resumed sweep)
};

// Runs the whole inventory and writes one CSV + sidecar per (point, seed),
// then assembles the manifest single-threaded. threads = 1 is the serial
// reference path; anything else hands the loop to OpenMP. Existing outputs
// are skipped so interrupted sweeps resume.
SweepResult run_sweep(const ExperimentConfig& config);

std::string manifest_path_for(const ExperimentConfig& config);

std::uint64_t fnv1a64_bytes(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace tetd
