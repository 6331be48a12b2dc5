#pragma once

#include <Eigen/Dense>
#include <string>
#include <tuple>

#include "tetd/rng.hpp"

namespace tetd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Finite MDP with deterministic rewards r(s,a). Immutable after construction;
// all invariants (stochasticity, discount range) are checked up front.
struct TabularMdp {
  int n_states = 0;
  int n_actions = 0;
  // transition[s](a, s') = p(s'|s,a), one row-stochastic A x S block per state.
  std::vector<MatrixXd> transition;
  MatrixXd reward;       // S x A
  double discount = 0.0;  // gamma in [0, 1)
  VectorXd initial_dist;  // p0 over states

  double p(int s, int a, int s_next) const { return transition[s](a, s_next); }

  void validate() const;
};

struct TabularPolicy {
  MatrixXd probs;  // S x A, rows sum to 1

  int n_states() const { return static_cast<int>(probs.rows()); }
  int n_actions() const { return static_cast<int>(probs.cols()); }
  void validate() const;
};

// Strictly positive weighting over states (prediction) or state-action pairs
// (control).
struct InterestFunction {
  VectorXd values;

  static InterestFunction ones(int n) { return {VectorXd::Ones(n)}; }
  void validate() const;
};

struct StationaryDistribution {
  VectorXd dist;
};

struct Transition {
  int action;
  double reward;
  int next_state;
};

// P_pi(s, s') = sum_a pi(a|s) p(s'|s,a).
MatrixXd state_transition_matrix(const TabularMdp& mdp, const TabularPolicy& policy);

// P_pi((s,a), (s',a')) = p(s'|s,a) pi(a'|s'). Pairs are indexed s * A + a.
MatrixXd state_action_transition_matrix(const TabularMdp& mdp, const TabularPolicy& policy);

inline int pair_index(int s, int a, int n_actions) { return s * n_actions + a; }

// Reward vector over pairs, r(s,a), indexed like the state-action matrices.
VectorXd state_action_reward(const TabularMdp& mdp);

// r_pi(s) = sum_a pi(a|s) r(s,a).
VectorXd policy_reward(const TabularMdp& mdp, const TabularPolicy& policy);

// v_pi = (I - gamma P_pi)^-1 r_pi.
VectorXd closed_form_values(const TabularMdp& mdp, const TabularPolicy& policy);

// Solves d^T P = d^T by power iteration (tol 1e-12, <= 1e6 sweeps), falling
// back to a dense solve of (P^T - I)d = 0 with sum(d) = 1. Throws if the chain
// is not ergodic: residual above 1e-10, an entry below 1e-14, or a second
// eigenvalue on the unit circle (reducible or periodic chain).
StationaryDistribution stationary_distribution(const MatrixXd& transition);

// Stationary distribution over pairs: d(s,a) = d_mu(s) mu(a|s).
StationaryDistribution state_action_stationary_distribution(const TabularMdp& mdp,
                                                            const TabularPolicy& mu);

Transition sample_step(const TabularMdp& mdp, const TabularPolicy& policy, int state, Rng& rng);

int sample_initial_state(const TabularMdp& mdp, Rng& rng);

// Checks Assumptions on behavior policies: ergodic induced chain and full
// action coverage mu(a|s) > 0. Throws with a precise message on violation.
void validate_behavior(const TabularMdp& mdp, const TabularPolicy& mu);

TabularMdp load_mdp_json(const std::string& path);
TabularMdp parse_mdp_json(const std::string& text);
std::string mdp_to_json(const TabularMdp& mdp);

}  // namespace tetd
