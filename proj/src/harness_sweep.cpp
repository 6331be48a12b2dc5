#include "tetd/harness/sweep.hpp"

#include <omp.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tetd/envs/baird.hpp"
#include "tetd/envs/cartpole_runner.hpp"
#include "tetd/runners.hpp"

namespace fs = std::filesystem;

namespace tetd {

namespace {

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == '|') c = '_';
  return s;
}

std::string target_label(const ExperimentConfig& config, double target) {
  if (config.environment == "cartpole") return "tau" + format_label(config.cartpole_temperature);
  return (config.setting == "prediction" ? "pi" : "tau") + format_label(target);
}

SoftmaxPolicySpec control_behavior_spec(const ExperimentConfig& config, double temperature,
                                        const TabularPolicy& fixed_mu) {
  SoftmaxPolicySpec spec;
  if (config.setting == "control-fixed-behavior") {
    spec.temperature = temperature;  // irrelevant at epsilon = 1 but must be valid
    spec.epsilon_mixture = 1.0;
    spec.base_policy = fixed_mu;
  } else {
    spec.temperature = config.behavior_temperature;
    spec.epsilon_mixture = config.changing_mixture;
    spec.base_policy = fixed_mu;
  }
  return spec;
}

}  // namespace

std::vector<RunPoint> expand_points(const ExperimentConfig& config) {
  config.validate();
  std::vector<double> targets;
  if (config.environment == "cartpole")
    targets = {config.cartpole_temperature};
  else if (config.setting == "prediction")
    targets = config.target_dashed;
  else
    targets = config.temperatures;

  std::vector<RunPoint> points;
  for (const auto& grid : config.algorithms) {
    for (const AgentConfig& base : grid.expand()) {
      for (double target : targets) {
        for (double alpha : config.alphas) {
          RunPoint p;
          p.agent = base;
          p.agent.learning_rate = LearningRate::constant(alpha);
          p.target = target;
          p.alpha = alpha;
          std::ostringstream group;
          group << config.environment << '|' << config.setting << '|' << p.agent.label() << '|'
                << target_label(config, target);
          p.group = group.str();
          p.fingerprint = p.group + "|alpha" + format_label(alpha);
          points.push_back(std::move(p));
        }
      }
    }
  }
  return points;
}

RunRecord execute_run(const ExperimentConfig& config, const RunPoint& point, std::uint64_t seed) {
  RunRecord record;
  if (config.environment == "cartpole") {
    CartPoleRunSpec spec;
    spec.steps = config.steps;
    spec.eval_stride = config.eval_stride;
    spec.eval_episodes = config.eval_episodes;
    spec.target_temperature = config.cartpole_temperature;
    spec.behavior_temperature = config.behavior_temperature;
    spec.behavior_epsilon = config.behavior_epsilon;
    record = run_cartpole_control(spec, point.agent, seed);
  } else {
    const BairdEnv env = baird_env();
    if (config.setting == "prediction") {
      record = run_prediction(env.mdp, env.behavior, baird_target(point.target),
                              env.prediction_features, InterestFunction::ones(env.mdp.n_states),
                              point.agent, env.prediction_w0, config.steps, config.eval_points,
                              seed);
    } else {
      SoftmaxPolicySpec target;
      target.temperature = point.target;
      const SoftmaxPolicySpec behavior = control_behavior_spec(config, point.target, env.behavior);
      record = run_control(env.mdp, env.control_features,
                           InterestFunction::ones(env.mdp.n_states * env.mdp.n_actions), behavior,
                           target, point.agent, env.control_w0, config.steps, config.eval_points,
                           seed);
    }
  }
  record.fingerprint = point.group;
  record.extra["alpha"] = point.alpha;
  record.extra["target"] = point.target;
  return record;
}

std::string manifest_path_for(const ExperimentConfig& config) {
  return (fs::path(config.output_dir) / "manifest.json").string();
}

std::uint64_t fnv1a64_bytes(const std::string& bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  fs::create_directories(config.output_dir);

  struct Task {
    RunPoint point;
    int seed_index;
    std::string csv, meta;
  };
  std::vector<Task> tasks;
  for (const RunPoint& point : expand_points(config)) {
    for (int s = 0; s < config.seeds; ++s) {
      Task t{point, s, "", ""};
      const std::string stem = sanitize(point.fingerprint) + "_s" + std::to_string(s);
      t.csv = (fs::path(config.output_dir) / (stem + ".csv")).string();
      t.meta = (fs::path(config.output_dir) / (stem + ".meta.json")).string();
      tasks.push_back(std::move(t));
    }
  }

  std::atomic<int> executed{0};
  std::atomic<int> skipped{0};
  auto process = [&](const Task& task) {
    if (fs::exists(task.csv) && fs::exists(task.meta)) {
      ++skipped;
      return;
    }
    RunRecord record =
        execute_run(config, task.point, config.base_seed + static_cast<std::uint64_t>(task.seed_index));
    write_record_csv(record, task.csv);
    write_record_meta(record, task.meta);
    ++executed;
  };

  const long count = static_cast<long>(tasks.size());
  if (config.threads == 1) {
    for (long i = 0; i < count; ++i) process(tasks[i]);
  } else {
    if (config.threads > 1) omp_set_num_threads(config.threads);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) process(tasks[i]);
  }

  // Manifest assembled single-threaded; entries sorted, hash over file bytes.
  nlohmann::json entries = nlohmann::json::array();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const Task& task : tasks) {
    nlohmann::json e;
    e["csv"] = fs::path(task.csv).filename().string();
    e["meta"] = fs::path(task.meta).filename().string();
    e["fingerprint"] = task.point.fingerprint;
    e["seed"] = config.base_seed + static_cast<std::uint64_t>(task.seed_index);
    entries.push_back(e);
    for (const std::string& path : {task.csv, task.meta}) {
      std::ifstream in(path, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      hash = fnv1a64_bytes(fs::path(path).filename().string(), hash);
      hash = fnv1a64_bytes(ss.str(), hash);
    }
  }
  nlohmann::json manifest;
  manifest["config"] = nlohmann::json::parse(config_to_json(config));
  manifest["entries"] = entries;
  {
    std::ostringstream hex;
    hex << std::hex << hash;
    manifest["hash"] = hex.str();
  }
  const std::string manifest_path = manifest_path_for(config);
  std::ofstream out(manifest_path, std::ios::trunc);
  out << manifest.dump(2) << '\n';

  return {manifest_path, executed.load(), skipped.load()};
}

}  // namespace tetd
