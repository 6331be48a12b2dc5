#include "tetd/run_record.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tetd {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_record_csv(const RunRecord& record, const std::string& csv_path) {
  std::ofstream out(csv_path, std::ios::trunc);
  if (!out) throw std::runtime_error("write_record_csv: cannot open " + csv_path);
  out << "step,value\n";
  for (const auto& [step, value] : record.values)
    out << step << ',' << format_double(value) << '\n';
}

void write_record_meta(const RunRecord& record, const std::string& meta_path) {
  nlohmann::json j;
  j["fingerprint"] = record.fingerprint;
  j["seed"] = record.seed;
  j["metric"] = record.metric;
  j["diverged"] = record.diverged;
  auto w = nlohmann::json::array();
  for (int i = 0; i < record.final_weights.size(); ++i) w.push_back(record.final_weights(i));
  j["final_weights"] = w;
  j["extra"] = record.extra;
  std::ofstream out(meta_path, std::ios::trunc);
  if (!out) throw std::runtime_error("write_record_meta: cannot open " + meta_path);
  out << j.dump(2) << '\n';
}

RunRecord read_record(const std::string& csv_path, const std::string& meta_path) {
  RunRecord record;
  std::ifstream meta(meta_path);
  if (!meta) throw std::runtime_error("read_record: cannot open " + meta_path);
  nlohmann::json j;
  meta >> j;
  record.fingerprint = j.at("fingerprint").get<std::string>();
  record.seed = j.at("seed").get<std::uint64_t>();
  record.metric = j.at("metric").get<std::string>();
  record.diverged = j.at("diverged").get<bool>();
  const auto& w = j.at("final_weights");
  record.final_weights.resize(static_cast<int>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i)
    record.final_weights(static_cast<int>(i)) = w.at(i).get<double>();
  record.extra = j.at("extra").get<std::map<std::string, double>>();

  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("read_record: cannot open " + csv_path);
  std::string line;
  std::getline(csv, line);  // header
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("read_record: malformed row in " + csv_path);
    record.values.emplace_back(std::stol(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  return record;
}

}  // namespace tetd
