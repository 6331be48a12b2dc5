#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tetd/run_record.hpp"

namespace tetd {

// Seed-aggregated curve for one grid point (fixed algorithm, target, alpha).
struct AggregatedCurve {
  std::string group;  // point id without the learning rate
  double alpha = 0.0;
  std::string metric;
  std::vector<long> steps;
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::vector<double> seed_variance;  // across-seed variance at each point
  double final_mean = 0.0;
  double initial_mean = 0.0;
  double avg_variance = 0.0;  // mean of seed_variance over the curve
  int n_seeds = 0;
  bool any_diverged = false;
  bool all_diverged = false;
};

AggregatedCurve aggregate_records(const std::vector<RunRecord>& seeds_of_one_point);

// Best learning rate within a group: minimizes (or maximizes, for returns)
// the final aggregated metric; exact ties go to the smaller alpha. Returns
// nothing when every run of every alpha diverged.
std::optional<AggregatedCurve> select_best_alpha(const std::vector<AggregatedCurve>& by_alpha,
                                                 bool maximize);

// Reads every record referenced by a manifest and groups it by point.
// Key: group id; inner key: alpha.
std::map<std::string, std::map<double, std::vector<RunRecord>>> load_manifest_records(
    const std::string& manifest_path);

struct VarianceCell {
  bool populated = false;
  double raw = 0.0;    // average across-seed variance of the best-alpha curve
  int exponent = 0;    // floor(log10(raw)); meaningless when raw == 0
  double alpha = 0.0;  // chosen learning rate
};

struct VarianceTable {
  std::vector<std::string> row_labels;  // target-policy settings
  std::vector<std::string> col_labels;  // algorithm variants
  std::vector<std::vector<VarianceCell>> cells;
};

// Success rules: prediction populates a cell when the final mean error is
// below the threshold; the control settings require no divergence and a
// final weight norm no larger than the initial one; return metrics require
// only a non-diverged best curve.
VarianceTable variance_table(
    const std::map<std::string, std::map<double, std::vector<RunRecord>>>& grouped,
    double success_threshold);

std::string table_to_text(const VarianceTable& table);
std::string table_to_json(const VarianceTable& table);

// Trailing moving average; the first window-1 points average the available
// prefix.
std::vector<double> smooth(const std::vector<double>& curve, int window);

// Writes per-group aggregate CSVs (step, mean, stderr) for the best alpha.
void write_aggregates(const std::string& output_dir,
                      const std::map<std::string, std::map<double, std::vector<RunRecord>>>& grouped);

}  // namespace tetd
