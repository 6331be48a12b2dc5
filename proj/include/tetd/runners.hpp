#pragma once

#include "tetd/agents.hpp"
#include "tetd/mdp.hpp"
#include "tetd/run_record.hpp"

namespace tetd {

// Weight norms above this terminate a run as diverged; the last finite metric
// is repeated over the remaining evaluation points.
constexpr double kDivergenceNorm = 1e10;

// Off-policy prediction on a tabular MDP with fixed behavior and target
// policies. The metric is the root-mean-square value error
// ||Xw - v_pi||_{d_mu} with v_pi solved in closed form.
RunRecord run_prediction(const TabularMdp& mdp, const TabularPolicy& mu, const TabularPolicy& pi,
                         const FeatureMap& features, const InterestFunction& interest,
                         const AgentConfig& agent, const Eigen::VectorXd& w0, long steps,
                         int eval_points, std::uint64_t seed);

// Off-policy control on a tabular MDP with weight-dependent softmax policies
// over state-action features. The metric is ||w_t|| (the distance to the
// zero-reward fixed point in the benchmark this harness targets). The
// unprojected variant rebuilds the window's importance ratios from the
// current weights every step; the projected variant reuses stored ratios.
RunRecord run_control(const TabularMdp& mdp, const FeatureMap& sa_features,
                      const InterestFunction& sa_interest, const SoftmaxPolicySpec& behavior,
                      const SoftmaxPolicySpec& target, const AgentConfig& agent,
                      const Eigen::VectorXd& w0, long steps, int eval_points, std::uint64_t seed);

double rmsve(const Eigen::VectorXd& w, const FeatureMap& features, const Eigen::VectorXd& v_pi,
             const Eigen::VectorXd& d_mu);

}  // namespace tetd
