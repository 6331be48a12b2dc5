#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace tetd {

// Per-run result: one metric sampled at fixed evaluation steps, plus enough
// metadata to reproduce and aggregate the run. Serialized as a two-column CSV
// next to a JSON sidecar.
struct RunRecord {
  std::string fingerprint;  // config-point id (no seed)
  std::uint64_t seed = 0;
  std::string metric;  // "rmsve" | "weight_norm" | "eval_return"
  std::vector<std::pair<long, double>> values;
  bool diverged = false;
  Eigen::VectorXd final_weights;
  std::map<std::string, double> extra;  // initial metric, physics constants, ...

  double final_value() const { return values.empty() ? 0.0 : values.back().second; }
};

void write_record_csv(const RunRecord& record, const std::string& csv_path);
void write_record_meta(const RunRecord& record, const std::string& meta_path);
RunRecord read_record(const std::string& csv_path, const std::string& meta_path);

// Shared formatting used everywhere doubles are serialized, so that reruns
// are byte-identical.
std::string format_double(double v);

// Shorter form for file names and table labels (grid values are tidy).
std::string format_label(double v);

}  // namespace tetd
