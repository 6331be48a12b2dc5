#pragma once

#include <Eigen/Dense>
#include <limits>

#include "tetd/features.hpp"
#include "tetd/policies.hpp"
#include "tetd/traces.hpp"

namespace tetd {

// Seven learner variants plus the soft-trace control baseline. Truncation -1
// selects the untruncated trace, so TruncatedEtd(-1) coincides with Etd0Full
// and the control variants cover the no-truncation baseline.
enum class Algorithm {
  OffPolicyTD,
  Etd0Full,
  TruncatedEtd,
  EtdBeta,
  ProjectedTruncatedEtd,
  TruncatedEmphaticExpectedSarsa,
  ProjectedTruncatedEmphaticExpectedSarsa,
  ProjectedEmphaticExpectedSarsaBeta,
};

constexpr int kInfiniteTruncation = -1;
constexpr double kNoProjection = std::numeric_limits<double>::infinity();

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);
bool algorithm_is_control(Algorithm a);

struct LearningRate {
  enum class Kind { Constant, InverseT } kind = Kind::Constant;
  double alpha = 0.0;         // constant step size
  double alpha_lambda = 0.0;  // schedule 1 / (2 alpha_lambda (t+1))

  static LearningRate constant(double a) { return {Kind::Constant, a, 0.0}; }
  static LearningRate inverse_t(double alpha_lambda) {
    return {Kind::InverseT, 0.0, alpha_lambda};
  }

  double at(long t) const {
    return kind == Kind::Constant ? alpha : 1.0 / (2.0 * alpha_lambda * (static_cast<double>(t) + 1.0));
  }
  void validate() const;
};

struct AgentConfig {
  Algorithm algorithm = Algorithm::OffPolicyTD;
  int truncation = 0;  // n; kInfiniteTruncation disables truncation
  double beta = 0.0;   // soft-trace decay for the Beta variants
  LearningRate learning_rate;
  double projection_radius = kNoProjection;
  bool incremental_trace = false;

  void validate() const;
  // Trace used by this variant at a given discount and indexing convention.
  TraceConfig trace_config(double gamma, TraceIndexing indexing) const;
  std::string label() const;  // stable id used in filenames and tables
};

inline Eigen::VectorXd project_ball(Eigen::VectorXd w, double radius) {
  const double norm = w.norm();
  if (norm > radius) w *= radius / norm;
  return w;
}

// One emphatic TD update with linear features:
//   w += alpha * trace * rho * (r + gamma x(s')^T w - x(s)^T w) x(s),
// then a ball projection. Returns the TD error.
double prediction_step(Eigen::VectorXd& w, const FeatureMap& features, double gamma, int state,
                       double reward, int next_state, double trace, double rho, double alpha,
                       double projection_radius = kNoProjection);

// One expected-SARSA update with state-action features:
//   w += alpha * trace * (r + gamma sum_a pi(a|s') q(s',a) - q(s,a)) x(s,a),
// then a ball projection. target_row is pi_w(.|s'). Returns the TD error.
double expected_sarsa_step(Eigen::VectorXd& w, const FeatureMap& features, int n_actions,
                           double gamma, int state, int action, double reward, int next_state,
                           const Eigen::VectorXd& target_row, double trace, double alpha,
                           double projection_radius = kNoProjection);

}  // namespace tetd
