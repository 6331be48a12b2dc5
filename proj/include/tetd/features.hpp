#pragma once

#include <Eigen/Dense>
#include <string>

namespace tetd {

// Linear feature matrix. Rows are indexed by state (prediction) or by
// state-action pair (control, row s * A + a); columns are the K feature
// dimensions. Rank is computed once with tolerance 1e-10. Construction does
// not reject rank-deficient maps -- the flagship counterexample features are
// deliberately overcomplete -- but every solver that inverts through X checks
// and refuses.
class FeatureMap {
 public:
  explicit FeatureMap(Eigen::MatrixXd matrix);

  const Eigen::MatrixXd& matrix() const { return x_; }
  int rows() const { return static_cast<int>(x_.rows()); }
  int dim() const { return static_cast<int>(x_.cols()); }
  int column_rank() const { return rank_; }
  bool has_full_column_rank() const { return rank_ == dim(); }
  void require_full_column_rank(const std::string& where) const;

  Eigen::VectorXd row(int index) const { return x_.row(index).transpose(); }
  double value(int index, const Eigen::VectorXd& weights) const { return x_.row(index) * weights; }

 private:
  Eigen::MatrixXd x_;
  int rank_;
};

FeatureMap load_features_json(const std::string& path);
FeatureMap parse_features_json(const std::string& text);

}  // namespace tetd
