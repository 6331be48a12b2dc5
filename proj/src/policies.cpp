#include "tetd/policies.hpp"

#include <cmath>
#include <stdexcept>

namespace tetd {

void SoftmaxPolicySpec::validate() const {
  if (temperature <= 0.0) throw std::invalid_argument("SoftmaxPolicySpec: temperature must be > 0");
  if (epsilon_mixture < 0.0 || epsilon_mixture > 1.0)
    throw std::invalid_argument("SoftmaxPolicySpec: mixture weight must lie in [0, 1]");
  if (epsilon_mixture > 0.0 && !base_policy)
    throw std::invalid_argument("SoftmaxPolicySpec: mixture weight set but no base policy given");
}

Eigen::VectorXd softmax_probs(const Eigen::VectorXd& q, double temperature) {
  const Eigen::VectorXd scaled = q / temperature;
  const double m = scaled.maxCoeff();
  Eigen::VectorXd e = (scaled.array() - m).exp();
  return e / e.sum();
}

Eigen::VectorXd policy_row_from_values(const Eigen::VectorXd& q, const SoftmaxPolicySpec& spec,
                                       int state) {
  Eigen::VectorXd row = softmax_probs(q, spec.temperature);
  if (spec.epsilon_mixture > 0.0) {
    const Eigen::VectorXd base = spec.base_policy->probs.row(state).transpose();
    row = spec.epsilon_mixture * base + (1.0 - spec.epsilon_mixture) * row;
  }
  return row;
}

TabularPolicy softmax_policy_from_weights(const Eigen::VectorXd& weights, const FeatureMap& features,
                                          const SoftmaxPolicySpec& spec, int n_states,
                                          int n_actions) {
  spec.validate();
  if (features.rows() != n_states * n_actions)
    throw std::invalid_argument("softmax_policy_from_weights: feature rows != n_states * n_actions");
  TabularPolicy policy;
  policy.probs.resize(n_states, n_actions);
  Eigen::VectorXd q(n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) q(a) = features.value(pair_index(s, a, n_actions), weights);
    policy.probs.row(s) = policy_row_from_values(q, spec, s).transpose();
  }
  return policy;
}

}  // namespace tetd
