#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tetd/agents.hpp"

namespace tetd {

// One algorithm column of an experiment: the variant name plus the grid of
// its own hyperparameter (truncation lengths or soft decays).
struct AlgorithmGrid {
  std::string name;              // id from algorithm_name()
  std::vector<int> truncations;  // -1 selects the untruncated trace
  std::vector<double> betas;
  double projection_radius = kNoProjection;

  // Expanded per-grid-point agent configs (learning rate filled in later).
  std::vector<AgentConfig> expand() const;
};

struct ExperimentConfig {
  std::string environment = "baird";   // "baird" | "cartpole"
  std::string setting = "prediction";  // "prediction" | "control-fixed-behavior" |
                                       // "control-changing-behavior"
  std::vector<AlgorithmGrid> algorithms;
  std::vector<double> alphas;
  std::vector<double> target_dashed;  // prediction target-policy grid
  std::vector<double> temperatures;   // control target-policy grid
  int seeds = 30;
  long steps = 100000;
  int eval_points = 100;
  long eval_stride = 5000;  // cart-pole evaluation cadence
  int eval_episodes = 10;
  double behavior_epsilon = 0.95;      // cart-pole mixture weight on uniform
  double behavior_temperature = 1.0;   // cart-pole / changing-behavior softmax
  double changing_mixture = 0.9;       // weight on the fixed policy when changing
  double cartpole_temperature = 0.01;  // cart-pole target softmax
  std::string output_dir = "out";
  int threads = 0;  // 0 = library default, 1 = serial reference
  std::uint64_t base_seed = 0;

  static ExperimentConfig defaults();
  void validate() const;
};

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace tetd
