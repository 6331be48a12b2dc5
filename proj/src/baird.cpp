#include "tetd/envs/baird.hpp"

namespace tetd {

BairdEnv baird_env() {
  TabularMdp mdp;
  mdp.n_states = kBairdStates;
  mdp.n_actions = 2;
  mdp.transition.assign(kBairdStates, MatrixXd::Zero(2, kBairdStates));
  for (int s = 0; s < kBairdStates; ++s) {
    for (int s2 = 0; s2 < 6; ++s2) mdp.transition[s](kBairdDashed, s2) = 1.0 / 6.0;
    mdp.transition[s](kBairdSolid, 6) = 1.0;
  }
  mdp.reward = MatrixXd::Zero(kBairdStates, 2);
  mdp.discount = 0.99;
  mdp.initial_dist = VectorXd::Constant(kBairdStates, 1.0 / kBairdStates);
  mdp.validate();

  MatrixXd x = MatrixXd::Zero(kBairdStates, 8);
  for (int s = 0; s < 6; ++s) {
    x(s, s) = 2.0;
    x(s, 7) = 1.0;
  }
  x(6, 6) = 1.0;
  x(6, 7) = 2.0;

  Eigen::VectorXd w0(8);
  w0 << 1, 1, 1, 1, 1, 1, 10, 1;

  MatrixXd x_sa = MatrixXd::Zero(kBairdStates * 2, 16);
  for (int s = 0; s < kBairdStates; ++s)
    for (int a = 0; a < 2; ++a) x_sa.block(pair_index(s, a, 2), 8 * a, 1, 8) = x.row(s);

  Eigen::VectorXd w0_sa(16);
  w0_sa << w0, w0;

  TabularPolicy mu;
  mu.probs.resize(kBairdStates, 2);
  mu.probs.col(kBairdDashed).setConstant(6.0 / 7.0);
  mu.probs.col(kBairdSolid).setConstant(1.0 / 7.0);

  return {std::move(mdp), FeatureMap(std::move(x)), std::move(w0), FeatureMap(std::move(x_sa)),
          std::move(w0_sa), std::move(mu)};
}

TabularPolicy baird_target(double dashed_prob) {
  if (dashed_prob < 0.0 || dashed_prob > 1.0)
    throw std::invalid_argument("baird_target: probability out of range");
  TabularPolicy pi;
  pi.probs.resize(kBairdStates, 2);
  pi.probs.col(kBairdDashed).setConstant(dashed_prob);
  pi.probs.col(kBairdSolid).setConstant(1.0 - dashed_prob);
  return pi;
}

}  // namespace tetd
