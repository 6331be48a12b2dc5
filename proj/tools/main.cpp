#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "tetd/analysis.hpp"
#include "tetd/envs/baird.hpp"
#include "tetd/harness/aggregate.hpp"
#include "tetd/harness/config.hpp"
#include "tetd/harness/sweep.hpp"

namespace fs = std::filesystem;
using namespace tetd;

namespace {

int cmd_run(const std::string& config_path, bool print_defaults, int threads) {
  if (print_defaults) {
    std::cout << config_to_json(ExperimentConfig::defaults()) << '\n';
    return 0;
  }
  ExperimentConfig config = load_config(config_path);
  if (threads >= 0) config.threads = threads;
  const SweepResult result = run_sweep(config);
  std::cout << "executed " << result.executed << " runs, skipped " << result.skipped
            << " existing; manifest: " << result.manifest_path << '\n';
  return 0;
}

struct AnalyzeOptions {
  std::string mdp_path;
  std::string env;
  std::string features = "tabular";  // "tabular" | "baird" | path to JSON
  std::string target_path;
  std::string behavior_path;
  double target_dashed = -1.0;
  double behavior_dashed = -1.0;
  long n = 4;
  bool control = false;
  int pairs = 10000;
  std::string out;
};

TabularPolicy uniform_policy(const TabularMdp& mdp) {
  TabularPolicy p;
  p.probs = MatrixXd::Constant(mdp.n_states, mdp.n_actions, 1.0 / mdp.n_actions);
  return p;
}

TabularPolicy load_policy(const std::string& path, const TabularMdp& mdp) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open policy file " + path);
  nlohmann::json j;
  in >> j;
  const auto& m = j.contains("probs") ? j.at("probs") : j;
  TabularPolicy p;
  p.probs.resize(mdp.n_states, mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a) p.probs(s, a) = m.at(s).at(a).get<double>();
  p.validate();
  return p;
}

int cmd_analyze(const AnalyzeOptions& opt) {
  TabularMdp mdp;
  std::optional<FeatureMap> features;
  if (opt.env == "baird") {
    BairdEnv env = baird_env();
    mdp = env.mdp;
    if (opt.features == "baird")
      features = opt.control ? env.control_features : env.prediction_features;
  } else if (!opt.mdp_path.empty()) {
    mdp = load_mdp_json(opt.mdp_path);
  } else {
    std::cerr << "analyze: provide --mdp <file> or --env baird\n";
    return 2;
  }

  TabularPolicy mu = opt.behavior_path.empty() ? uniform_policy(mdp)
                                               : load_policy(opt.behavior_path, mdp);
  if (opt.env == "baird" && opt.behavior_path.empty() && opt.behavior_dashed < 0.0)
    mu = baird_env().behavior;
  if (opt.behavior_dashed >= 0.0) mu = baird_target(opt.behavior_dashed);

  TabularPolicy pi = uniform_policy(mdp);
  if (!opt.target_path.empty()) pi = load_policy(opt.target_path, mdp);
  if (opt.target_dashed >= 0.0) pi = baird_target(opt.target_dashed);

  const int rows = opt.control ? mdp.n_states * mdp.n_actions : mdp.n_states;
  const InterestFunction interest = InterestFunction::ones(rows);
  const EmphasisInputs inputs = opt.control ? control_inputs(mdp, mu, pi, interest)
                                            : prediction_inputs(mdp, mu, pi, interest);
  if (!features) {
    if (opt.features == "tabular")
      features = FeatureMap(MatrixXd::Identity(rows, rows));
    else if (opt.features == "baird")
      throw std::runtime_error("analyze: --features baird requires --env baird");
    else
      features = load_features_json(opt.features);
  }
  const VectorXd reward =
      opt.control ? state_action_reward(mdp) : policy_reward(mdp, pi);

  const EmphasisReport report = analyze_emphasis(inputs, *features, reward, opt.n, opt.pairs);
  const std::string json = report_to_json(report);
  if (opt.out.empty()) {
    std::cout << json << '\n';
  } else {
    std::ofstream out(opt.out, std::ios::trunc);
    out << json << '\n';
    std::cout << "report written to " << opt.out << '\n';
  }
  return 0;
}

int cmd_table(const std::string& manifest, double threshold) {
  const std::string path =
      fs::is_directory(manifest) ? (fs::path(manifest) / "manifest.json").string() : manifest;
  const auto grouped = load_manifest_records(path);
  const VarianceTable table = variance_table(grouped, threshold);
  const fs::path dir = fs::path(path).parent_path();
  write_aggregates(dir.string(), grouped);
  std::ofstream json(dir / "variance_table.json", std::ios::trunc);
  json << table_to_json(table) << '\n';
  std::cout << table_to_text(table);
  return 0;
}

int cmd_smooth(const std::string& csv, int window, const std::string& out_path) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("smooth: cannot open " + csv);
  std::string header, line;
  std::getline(in, header);
  std::vector<long> steps;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    steps.push_back(std::stol(line.substr(0, comma)));
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  const std::vector<double> smoothed = smooth(values, window);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::trunc);
    out = &file;
  }
  (*out) << "step,value\n";
  for (std::size_t k = 0; k < steps.size(); ++k)
    (*out) << steps[k] << ',' << format_double(smoothed[k]) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"truncated emphatic TD experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  bool print_defaults = false;
  int threads = -1;
  auto* run = app.add_subcommand("run", "execute a sweep from a JSON config");
  run->add_option("config", config_path, "experiment config (JSON)");
  run->add_flag("--print-defaults", print_defaults, "print the default config and exit");
  run->add_option("--threads", threads, "worker threads (1 = serial)");

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "closed-form emphasis report");
  analyze->add_option("--mdp", an.mdp_path, "MDP definition (JSON)");
  analyze->add_option("--env", an.env, "built-in environment name (baird)");
  analyze->add_option("--features", an.features, "tabular | baird | features JSON path");
  analyze->add_option("--target", an.target_path, "target policy JSON");
  analyze->add_option("--behavior", an.behavior_path, "behavior policy JSON");
  analyze->add_option("--target-dashed", an.target_dashed, "Baird target pi(dashed)");
  analyze->add_option("--behavior-dashed", an.behavior_dashed, "Baird behavior mu(dashed)");
  analyze->add_option("--n", an.n, "truncation length");
  analyze->add_flag("--control", an.control, "state-action overload");
  analyze->add_option("--pairs", an.pairs, "random pairs for the contraction estimate");
  analyze->add_option("--out", an.out, "write the report here instead of stdout");

  std::string manifest;
  double threshold = 5.0;
  auto* table = app.add_subcommand("table", "variance table from a sweep manifest");
  table->add_option("manifest", manifest, "manifest.json or its directory")->required();
  table->add_option("--threshold", threshold, "prediction success threshold");

  std::string csv, smooth_out;
  int window = 10;
  auto* sm = app.add_subcommand("smooth", "sliding-window smoothing of a curve CSV");
  sm->add_option("csv", csv, "input CSV (step,value)")->required();
  sm->add_option("--window", window, "window size");
  sm->add_option("--out", smooth_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!print_defaults && config_path.empty())
        throw CLI::ValidationError("run", "config path required unless --print-defaults");
      return cmd_run(config_path, print_defaults, threads);
    }
    if (analyze->parsed()) return cmd_analyze(an);
    if (table->parsed()) return cmd_table(manifest, threshold);
    if (sm->parsed()) return cmd_smooth(csv, window, smooth_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
