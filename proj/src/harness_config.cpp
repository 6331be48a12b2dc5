#include "tetd/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tetd {

std::vector<AgentConfig> AlgorithmGrid::expand() const {
  const Algorithm alg = algorithm_from_name(name);
  std::vector<AgentConfig> out;
  auto base = [&] {
    AgentConfig cfg;
    cfg.algorithm = alg;
    cfg.projection_radius = projection_radius;
    cfg.learning_rate = LearningRate::constant(1.0);  // placeholder until the sweep fills it
    return cfg;
  };
  switch (alg) {
    case Algorithm::OffPolicyTD:
    case Algorithm::Etd0Full:
      out.push_back(base());
      break;
    case Algorithm::EtdBeta:
    case Algorithm::ProjectedEmphaticExpectedSarsaBeta:
      for (double b : betas) {
        AgentConfig cfg = base();
        cfg.beta = b;
        out.push_back(cfg);
      }
      break;
    default:
      for (int n : truncations) {
        AgentConfig cfg = base();
        cfg.truncation = n;
        out.push_back(cfg);
      }
      break;
  }
  if (out.empty()) throw std::invalid_argument("AlgorithmGrid: empty grid for " + name);
  return out;
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  for (int k = 0; k <= 19; ++k) c.alphas.push_back(0.1 * std::pow(2.0, -k));
  c.target_dashed = {0.0, 0.02, 0.04, 0.06, 0.08, 0.1};
  c.temperatures = {0.01, 0.1, 1.0};
  c.algorithms = {
      {"off-policy-td", {}, {}, kNoProjection},
      {"etd0", {}, {}, kNoProjection},
      {"truncated-etd", {2, 4, 8}, {}, kNoProjection},
      {"etd-beta", {}, {0.1, 0.2, 0.4, 0.8}, kNoProjection},
  };
  return c;
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> envs = {"baird", "cartpole"};
  static const std::set<std::string> settings = {"prediction", "control-fixed-behavior",
                                                 "control-changing-behavior"};
  if (!envs.count(environment))
    throw std::invalid_argument("ExperimentConfig: unknown environment '" + environment + "'");
  if (!settings.count(setting))
    throw std::invalid_argument("ExperimentConfig: unknown setting '" + setting + "'");
  if (environment == "cartpole" && setting == "prediction")
    throw std::invalid_argument("ExperimentConfig: cartpole supports control settings only");
  if (algorithms.empty()) throw std::invalid_argument("ExperimentConfig: algorithm list is empty");
  if (alphas.empty()) throw std::invalid_argument("ExperimentConfig: learning-rate grid is empty");
  if (environment == "baird" && setting == "prediction" && target_dashed.empty())
    throw std::invalid_argument("ExperimentConfig: target-policy grid is empty");
  if (environment == "baird" && setting != "prediction" && temperatures.empty())
    throw std::invalid_argument("ExperimentConfig: temperature grid is empty");
  if (seeds < 1) throw std::invalid_argument("ExperimentConfig: seeds must be >= 1");
  if (steps < 1) throw std::invalid_argument("ExperimentConfig: steps must be >= 1");
  if (eval_points < 1) throw std::invalid_argument("ExperimentConfig: eval_points must be >= 1");
  if (output_dir.empty()) throw std::invalid_argument("ExperimentConfig: output_dir is empty");
  for (const auto& grid : algorithms) grid.expand();  // shape check
}

namespace {
nlohmann::json grid_to_json(const AlgorithmGrid& g) {
  nlohmann::json j;
  j["name"] = g.name;
  j["truncations"] = g.truncations;
  j["betas"] = g.betas;
  if (std::isfinite(g.projection_radius)) j["projection_radius"] = g.projection_radius;
  return j;
}

AlgorithmGrid grid_from_json(const nlohmann::json& j) {
  AlgorithmGrid g;
  g.name = j.at("name").get<std::string>();
  if (j.contains("truncations")) {
    for (const auto& v : j.at("truncations"))
      g.truncations.push_back(v.is_string() ? kInfiniteTruncation : v.get<int>());
  }
  if (j.contains("betas")) g.betas = j.at("betas").get<std::vector<double>>();
  if (j.contains("projection_radius")) g.projection_radius = j.at("projection_radius").get<double>();
  return g;
}
}  // namespace

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["environment"] = c.environment;
  j["setting"] = c.setting;
  auto algs = nlohmann::json::array();
  for (const auto& g : c.algorithms) algs.push_back(grid_to_json(g));
  j["algorithms"] = algs;
  j["alphas"] = c.alphas;
  j["target_dashed"] = c.target_dashed;
  j["temperatures"] = c.temperatures;
  j["seeds"] = c.seeds;
  j["steps"] = c.steps;
  j["eval_points"] = c.eval_points;
  j["eval_stride"] = c.eval_stride;
  j["eval_episodes"] = c.eval_episodes;
  j["behavior_epsilon"] = c.behavior_epsilon;
  j["behavior_temperature"] = c.behavior_temperature;
  j["changing_mixture"] = c.changing_mixture;
  j["cartpole_temperature"] = c.cartpole_temperature;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  j["base_seed"] = c.base_seed;
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig c = ExperimentConfig::defaults();
  c.algorithms.clear();

  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  take("environment", c.environment);
  take("setting", c.setting);
  if (j.contains("algorithms"))
    for (const auto& g : j.at("algorithms")) c.algorithms.push_back(grid_from_json(g));
  if (c.algorithms.empty()) c.algorithms = ExperimentConfig::defaults().algorithms;
  take("alphas", c.alphas);
  take("target_dashed", c.target_dashed);
  take("temperatures", c.temperatures);
  take("seeds", c.seeds);
  take("steps", c.steps);
  take("eval_points", c.eval_points);
  take("eval_stride", c.eval_stride);
  take("eval_episodes", c.eval_episodes);
  take("behavior_epsilon", c.behavior_epsilon);
  take("behavior_temperature", c.behavior_temperature);
  take("changing_mixture", c.changing_mixture);
  take("cartpole_temperature", c.cartpole_temperature);
  take("output_dir", c.output_dir);
  take("threads", c.threads);
  take("base_seed", c.base_seed);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

}  // namespace tetd
