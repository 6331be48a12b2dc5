#pragma once

#include "tetd/agents.hpp"
#include "tetd/envs/cartpole.hpp"
#include "tetd/envs/tile_coder.hpp"
#include "tetd/run_record.hpp"

namespace tetd {

// Episodic off-policy control on cart-pole with tile-coded state-action
// features (one hash block per action). Behavior mixes a uniform policy with
// a softmax at behavior_temperature; the target is a pure softmax. Evaluation
// pauses training every eval_stride steps and reports the mean undiscounted
// return of eval_episodes target-policy episodes.
struct CartPoleRunSpec {
  CartPoleSpec physics;
  double discount = 0.99;
  int num_tilings = 8;
  int tiles_per_dim = 8;
  int hash_size = 1024;
  double target_temperature = 0.01;
  double behavior_temperature = 1.0;
  double behavior_epsilon = 0.95;  // probability of acting uniformly at random
  long steps = 100000;
  long eval_stride = 5000;
  int eval_episodes = 10;

  TileCoder make_coder() const;
};

RunRecord run_cartpole_control(const CartPoleRunSpec& spec, const AgentConfig& agent,
                               std::uint64_t seed);

// Mean undiscounted return of a uniformly random policy; the floor that
// learned policies are measured against.
double cartpole_random_baseline(const CartPoleSpec& physics, int episodes, std::uint64_t seed);

}  // namespace tetd
