#include "tetd/features.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tetd {

FeatureMap::FeatureMap(Eigen::MatrixXd matrix) : x_(std::move(matrix)) {
  if (x_.rows() == 0 || x_.cols() == 0)
    throw std::invalid_argument("FeatureMap: empty feature matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x_);
  svd.setThreshold(1e-10);
  rank_ = static_cast<int>(svd.rank());
}

void FeatureMap::require_full_column_rank(const std::string& where) const {
  if (!has_full_column_rank())
    throw std::invalid_argument(where + ": feature matrix is column-rank deficient (rank " +
                                std::to_string(rank_) + " of " + std::to_string(dim()) + ")");
}

FeatureMap parse_features_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const auto& m = j.contains("matrix") ? j.at("matrix") : j;
  const int rows = static_cast<int>(m.size());
  const int cols = static_cast<int>(m.at(0).size());
  Eigen::MatrixXd x(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) x(r, c) = m.at(r).at(c).get<double>();
  return FeatureMap(x);
}

FeatureMap load_features_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_features_json: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_features_json(ss.str());
}

}  // namespace tetd
