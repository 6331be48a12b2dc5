#pragma once

#include "tetd/features.hpp"
#include "tetd/mdp.hpp"

namespace tetd {

// Seven-state two-action counterexample: `solid` always jumps to the last
// state, `dashed` lands uniformly on the first six. Zero reward everywhere,
// gamma = 0.99, uniform start.
inline constexpr int kBairdDashed = 0;
inline constexpr int kBairdSolid = 1;
inline constexpr int kBairdStates = 7;

struct BairdEnv {
  TabularMdp mdp;
  FeatureMap prediction_features;  // 7 x 8 overcomplete map
  Eigen::VectorXd prediction_w0;   // (1,1,1,1,1,1,10,1)
  FeatureMap control_features;     // 14 x 16, one 8-dim block per action
  Eigen::VectorXd control_w0;      // prediction_w0 copied into both blocks
  TabularPolicy behavior;          // mu(dashed|s) = 6/7
};

BairdEnv baird_env();

// Target policy pi(dashed|s) = dashed_prob for every state.
TabularPolicy baird_target(double dashed_prob);

}  // namespace tetd
