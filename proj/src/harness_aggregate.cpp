#include "tetd/harness/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fs = std::filesystem;

namespace tetd {

AggregatedCurve aggregate_records(const std::vector<RunRecord>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("aggregate_records: no records");
  const std::size_t points = seeds.front().values.size();
  AggregatedCurve curve;
  curve.group = seeds.front().fingerprint;
  curve.metric = seeds.front().metric;
  curve.alpha = seeds.front().extra.count("alpha") ? seeds.front().extra.at("alpha") : 0.0;
  curve.n_seeds = static_cast<int>(seeds.size());
  curve.steps.resize(points);
  curve.mean.assign(points, 0.0);
  curve.stderr_.assign(points, 0.0);
  curve.seed_variance.assign(points, 0.0);
  curve.all_diverged = true;

  for (const RunRecord& r : seeds) {
    if (r.values.size() != points)
      throw std::invalid_argument("aggregate_records: evaluation grids differ across seeds");
    curve.any_diverged |= r.diverged;
    curve.all_diverged &= r.diverged;
    if (r.extra.count("initial_metric"))
      curve.initial_mean += r.extra.at("initial_metric") / static_cast<double>(seeds.size());
  }
  for (std::size_t k = 0; k < points; ++k) {
    curve.steps[k] = seeds.front().values[k].first;
    double sum = 0.0;
    for (const RunRecord& r : seeds) sum += r.values[k].second;
    const double mean = sum / static_cast<double>(seeds.size());
    double sq = 0.0;
    for (const RunRecord& r : seeds) {
      const double d = r.values[k].second - mean;
      sq += d * d;
    }
    const double var = seeds.size() > 1 ? sq / static_cast<double>(seeds.size() - 1) : 0.0;
    curve.mean[k] = mean;
    curve.seed_variance[k] = var;
    curve.stderr_[k] = std::sqrt(var / static_cast<double>(seeds.size()));
  }
  curve.final_mean = curve.mean.empty() ? 0.0 : curve.mean.back();
  double acc = 0.0;
  for (double v : curve.seed_variance) acc += v;
  curve.avg_variance = curve.seed_variance.empty() ? 0.0 : acc / curve.seed_variance.size();
  return curve;
}

std::optional<AggregatedCurve> select_best_alpha(const std::vector<AggregatedCurve>& by_alpha,
                                                 bool maximize) {
  if (by_alpha.empty()) throw std::invalid_argument("select_best_alpha: empty group");
  std::optional<AggregatedCurve> best;
  for (const AggregatedCurve& curve : by_alpha) {
    if (curve.all_diverged) continue;
    if (!best) {
      best = curve;
      continue;
    }
    const bool better = maximize ? curve.final_mean > best->final_mean
                                 : curve.final_mean < best->final_mean;
    const bool tie = curve.final_mean == best->final_mean && curve.alpha < best->alpha;
    if (better || tie) best = curve;
  }
  return best;
}

std::map<std::string, std::map<double, std::vector<RunRecord>>> load_manifest_records(
    const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("load_manifest_records: cannot open " + manifest_path);
  nlohmann::json manifest;
  in >> manifest;
  const fs::path dir = fs::path(manifest_path).parent_path();

  std::map<std::string, std::map<double, std::vector<RunRecord>>> grouped;
  for (const auto& entry : manifest.at("entries")) {
    RunRecord record = read_record((dir / entry.at("csv").get<std::string>()).string(),
                                   (dir / entry.at("meta").get<std::string>()).string());
    const double alpha = record.extra.count("alpha") ? record.extra.at("alpha") : 0.0;
    grouped[record.fingerprint][alpha].push_back(std::move(record));
  }
  return grouped;
}

namespace {

// Group ids look like env|setting|algorithm|target.
std::string group_column(const std::string& group) {
  const auto first = group.find('|');
  const auto second = group.find('|', first + 1);
  const auto third = group.rfind('|');
  return group.substr(second + 1, third - second - 1);
}

std::string group_row(const std::string& group) {
  return group.substr(group.rfind('|') + 1);
}

bool cell_successful(const AggregatedCurve& best, const std::string& metric, double threshold) {
  if (metric == "rmsve") return best.final_mean < threshold;
  if (metric == "weight_norm") return !best.any_diverged && best.final_mean <= best.initial_mean;
  return !best.all_diverged;
}

}  // namespace

VarianceTable variance_table(
    const std::map<std::string, std::map<double, std::vector<RunRecord>>>& grouped,
    double success_threshold) {
  VarianceTable table;
  std::vector<std::pair<std::string, std::string>> keys;  // (row, col) per group
  for (const auto& [group, by_alpha] : grouped) {
    const std::string row = group_row(group);
    const std::string col = group_column(group);
    if (std::find(table.row_labels.begin(), table.row_labels.end(), row) == table.row_labels.end())
      table.row_labels.push_back(row);
    if (std::find(table.col_labels.begin(), table.col_labels.end(), col) == table.col_labels.end())
      table.col_labels.push_back(col);
    keys.emplace_back(row, col);
  }
  std::sort(table.row_labels.begin(), table.row_labels.end());
  table.cells.assign(table.row_labels.size(),
                     std::vector<VarianceCell>(table.col_labels.size(), VarianceCell{}));

  std::size_t i = 0;
  for (const auto& [group, by_alpha] : grouped) {
    const auto& [row, col] = keys[i++];
    const auto r = std::find(table.row_labels.begin(), table.row_labels.end(), row) -
                   table.row_labels.begin();
    const auto c = std::find(table.col_labels.begin(), table.col_labels.end(), col) -
                   table.col_labels.begin();
    std::vector<AggregatedCurve> curves;
    bool maximize = false;
    for (const auto& [alpha, records] : by_alpha) {
      curves.push_back(aggregate_records(records));
      maximize = curves.back().metric == "eval_return";
    }
    const auto best = select_best_alpha(curves, maximize);
    if (!best) continue;  // every alpha diverged on every seed
    if (!cell_successful(*best, best->metric, success_threshold)) continue;
    VarianceCell& cell = table.cells[r][c];
    cell.populated = true;
    cell.raw = best->avg_variance;
    cell.exponent = best->avg_variance > 0.0
                        ? static_cast<int>(std::floor(std::log10(best->avg_variance)))
                        : 0;
    cell.alpha = best->alpha;
  }
  return table;
}

std::string table_to_text(const VarianceTable& table) {
  std::ostringstream os;
  os << "target";
  for (const auto& col : table.col_labels) os << '\t' << col;
  os << '\n';
  for (std::size_t r = 0; r < table.row_labels.size(); ++r) {
    os << table.row_labels[r];
    for (std::size_t c = 0; c < table.col_labels.size(); ++c) {
      const VarianceCell& cell = table.cells[r][c];
      if (!cell.populated)
        os << "\t-";
      else if (cell.raw == 0.0)
        os << "\t0";
      else
        os << "\t10^" << cell.exponent;
    }
    os << '\n';
  }
  return os.str();
}

std::string table_to_json(const VarianceTable& table) {
  nlohmann::json j;
  j["rows"] = table.row_labels;
  j["columns"] = table.col_labels;
  auto cells = nlohmann::json::array();
  for (const auto& row : table.cells) {
    auto jrow = nlohmann::json::array();
    for (const VarianceCell& cell : row) {
      nlohmann::json jc;
      jc["populated"] = cell.populated;
      if (cell.populated) {
        jc["raw"] = cell.raw;
        jc["exponent"] = cell.exponent;
        jc["alpha"] = cell.alpha;
      }
      jrow.push_back(jc);
    }
    cells.push_back(jrow);
  }
  j["cells"] = cells;
  return j.dump(2);
}

std::vector<double> smooth(const std::vector<double>& curve, int window) {
  if (window < 1) throw std::invalid_argument("smooth: window must be >= 1");
  std::vector<double> out(curve.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    acc += curve[k];
    if (k >= static_cast<std::size_t>(window)) acc -= curve[k - window];
    const double denom = std::min<std::size_t>(k + 1, window);
    out[k] = acc / static_cast<double>(denom);
  }
  return out;
}

void write_aggregates(const std::string& output_dir,
                      const std::map<std::string, std::map<double, std::vector<RunRecord>>>& grouped) {
  const fs::path dir = fs::path(output_dir) / "aggregates";
  fs::create_directories(dir);
  for (const auto& [group, by_alpha] : grouped) {
    std::vector<AggregatedCurve> curves;
    bool maximize = false;
    for (const auto& [alpha, records] : by_alpha) {
      curves.push_back(aggregate_records(records));
      maximize = curves.back().metric == "eval_return";
    }
    const auto best = select_best_alpha(curves, maximize);
    if (!best) continue;
    std::string name = group;
    for (char& ch : name)
      if (ch == '|') ch = '_';
    std::ofstream out(dir / (name + ".agg.csv"), std::ios::trunc);
    out << "step,mean,stderr\n";
    for (std::size_t k = 0; k < best->steps.size(); ++k)
      out << best->steps[k] << ',' << format_double(best->mean[k]) << ','
          << format_double(best->stderr_[k]) << '\n';
  }
}

}  // namespace tetd
