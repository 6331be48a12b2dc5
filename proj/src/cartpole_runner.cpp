#include "tetd/envs/cartpole_runner.hpp"

#include <cmath>

#include "tetd/runners.hpp"

namespace tetd {

namespace {

double sparse_q(const Eigen::VectorXd& w, const std::vector<int>& active, int action,
                int hash_size) {
  double q = 0.0;
  for (int idx : active) q += w(action * hash_size + idx);
  return q;
}

Eigen::Vector2d action_values(const Eigen::VectorXd& w, const std::vector<int>& active,
                              int hash_size) {
  return {sparse_q(w, active, 0, hash_size), sparse_q(w, active, 1, hash_size)};
}

Eigen::Vector2d behavior_probs(const Eigen::Vector2d& q, const CartPoleRunSpec& spec) {
  const Eigen::Vector2d soft = softmax_probs(q, spec.behavior_temperature);
  return Eigen::Vector2d::Constant(0.5 * spec.behavior_epsilon) +
         (1.0 - spec.behavior_epsilon) * soft;
}

int sample2(const Eigen::Vector2d& probs, Rng& rng) {
  return rng.uniform01() < probs(0) ? 0 : 1;
}

double episode_return(const CartPoleSpec& physics, const Eigen::VectorXd& w,
                      const TileCoder& coder, double temperature, int hash_size, Rng& rng) {
  CartPole env(physics);
  auto obs = env.reset(rng);
  double total = 0.0;
  while (!env.done()) {
    const auto active = coder.active_indices(obs);
    const Eigen::Vector2d probs = softmax_probs(action_values(w, active, hash_size), temperature);
    const auto result = env.step(sample2(probs, rng));
    total += result.reward;
    obs = result.obs;
  }
  return total;
}

}  // namespace

TileCoder CartPoleRunSpec::make_coder() const {
  return TileCoder(num_tilings, tiles_per_dim, hash_size,
                   {{-physics.x_threshold, physics.x_threshold},
                    {-3.0, 3.0},
                    {-physics.theta_threshold, physics.theta_threshold},
                    {-3.5, 3.5}});
}

double cartpole_random_baseline(const CartPoleSpec& physics, int episodes, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0xba5e11fe));
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    CartPole env(physics);
    env.reset(rng);
    while (!env.done()) total += env.step(rng.uniform_int(kCartPoleActions)).reward;
  }
  return total / episodes;
}

RunRecord run_cartpole_control(const CartPoleRunSpec& spec, const AgentConfig& agent,
                               std::uint64_t seed) {
  agent.validate();
  if (agent.algorithm == Algorithm::TruncatedEmphaticExpectedSarsa)
    throw std::invalid_argument(
        "run_cartpole_control: the ratio-recomputing learner is tabular-only; use the projected "
        "variant");
  if (!algorithm_is_control(agent.algorithm))
    throw std::invalid_argument("run_cartpole_control: prediction algorithm passed");

  const TileCoder coder = spec.make_coder();
  const int hash = spec.hash_size;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(hash * kCartPoleActions);

  RunRecord record;
  record.seed = seed;
  record.metric = "eval_return";
  record.extra = spec.physics.constants();
  record.extra["num_tilings"] = spec.num_tilings;
  record.extra["tiles_per_dim"] = spec.tiles_per_dim;
  record.extra["hash_size"] = hash;

  TraceEngine engine(agent.trace_config(spec.discount, TraceIndexing::Control));
  Rng rng(mix_seed(seed, 0xca47b01e));

  CartPole env(spec.physics);
  auto obs = env.reset(rng);
  auto active = coder.active_indices(obs);
  int action = sample2(behavior_probs(action_values(w, active, hash), spec), rng);
  engine.reset();

  int eval_index = 0;
  {
    Rng eval_rng(mix_seed(seed, 0x1417e7a1, 0));
    double total = 0.0;
    for (int e = 0; e < spec.eval_episodes; ++e)
      total += episode_return(spec.physics, w, coder, spec.target_temperature, hash, eval_rng);
    record.extra["initial_metric"] = total / spec.eval_episodes;
  }
  double frozen = record.extra["initial_metric"];

  for (long t = 0; t < spec.steps && !record.diverged; ++t) {
    const auto result = env.step(action);
    const auto next_obs = result.obs;
    const auto next_active = coder.active_indices(next_obs);

    const Eigen::Vector2d q_now = action_values(w, active, hash);
    const Eigen::Vector2d q_next = action_values(w, next_active, hash);
    const Eigen::Vector2d pi_now = softmax_probs(q_now, spec.target_temperature);
    const Eigen::Vector2d pi_next = softmax_probs(q_next, spec.target_temperature);
    const Eigen::Vector2d mu_now = behavior_probs(q_now, spec);
    const Eigen::Vector2d mu_next = behavior_probs(q_next, spec);

    const double rho = pi_now(action) / mu_now(action);
    const double trace = engine.push(rho, 1.0);

    const double expected_next = result.done ? 0.0 : pi_next.dot(q_next);
    const double td_error = result.reward + spec.discount * expected_next - q_now(action);
    const double scale = agent.learning_rate.at(t) * trace * td_error;
    for (int idx : active) w(action * hash + idx) += scale;
    if (std::isfinite(agent.projection_radius)) w = project_ball(std::move(w), agent.projection_radius);

    if (!std::isfinite(scale) || !std::isfinite(w(action * hash + active[0]))) {
      record.diverged = true;
      break;
    }

    if (result.done) {
      obs = env.reset(rng);
      active = coder.active_indices(obs);
      action = sample2(behavior_probs(action_values(w, active, hash), spec), rng);
      engine.reset();  // the followon recursion does not cross episode boundaries
    } else {
      obs = next_obs;
      active = next_active;
      action = sample2(mu_next, rng);
    }

    if ((t + 1) % spec.eval_stride == 0) {
      if (!w.allFinite() || w.norm() > kDivergenceNorm) {
        record.diverged = true;
        break;
      }
      ++eval_index;
      Rng eval_rng(mix_seed(seed, 0x1417e7a1, static_cast<std::uint64_t>(eval_index)));
      double total = 0.0;
      for (int e = 0; e < spec.eval_episodes; ++e)
        total +=
            episode_return(spec.physics, w, coder, spec.target_temperature, hash, eval_rng);
      frozen = total / spec.eval_episodes;
      record.values.emplace_back(t + 1, frozen);
    }
  }

  // Pad remaining evaluation points after early termination.
  for (long step = (eval_index + 1) * spec.eval_stride; step <= spec.steps;
       step += spec.eval_stride)
    record.values.emplace_back(step, frozen);

  record.final_weights = w;
  return record;
}

}  // namespace tetd
