#pragma once

#include <Eigen/Dense>
#include <optional>

#include "tetd/features.hpp"
#include "tetd/mdp.hpp"

namespace tetd {

// Weight-dependent policy family: a per-state softmax over action values at
// temperature tau, mixed with a fixed base policy. The mixture puts weight
// epsilon on the base, so epsilon = 1 freezes the policy at the base and
// epsilon = 0 is a pure softmax.
struct SoftmaxPolicySpec {
  double temperature = 1.0;
  double epsilon_mixture = 0.0;
  std::optional<TabularPolicy> base_policy;

  void validate() const;
};

// Numerically guarded softmax of q / tau (max subtracted before exp).
Eigen::VectorXd softmax_probs(const Eigen::VectorXd& q, double temperature);

// Action distribution at one state given its action values.
Eigen::VectorXd policy_row_from_values(const Eigen::VectorXd& q, const SoftmaxPolicySpec& spec,
                                       int state);

// Full tabular policy from state-action features and current weights.
// features rows are indexed s * n_actions + a.
TabularPolicy softmax_policy_from_weights(const Eigen::VectorXd& weights, const FeatureMap& features,
                                          const SoftmaxPolicySpec& spec, int n_states,
                                          int n_actions);

}  // namespace tetd
