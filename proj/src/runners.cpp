#include "tetd/runners.hpp"

#include <cmath>
#include <deque>

namespace tetd {

namespace {

std::vector<long> eval_schedule(long steps, int eval_points) {
  if (eval_points < 1) throw std::invalid_argument("eval_points must be >= 1");
  std::vector<long> at(eval_points);
  for (int k = 1; k <= eval_points; ++k)
    at[k - 1] = static_cast<long>(static_cast<double>(k) * static_cast<double>(steps) / eval_points);
  at.back() = steps;
  return at;
}

bool weights_ok(const Eigen::VectorXd& w) { return w.allFinite() && w.norm() <= kDivergenceNorm; }

}  // namespace

double rmsve(const Eigen::VectorXd& w, const FeatureMap& features, const Eigen::VectorXd& v_pi,
             const Eigen::VectorXd& d_mu) {
  const Eigen::VectorXd err = features.matrix() * w - v_pi;
  return std::sqrt(err.cwiseProduct(err).dot(d_mu));
}

RunRecord run_prediction(const TabularMdp& mdp, const TabularPolicy& mu, const TabularPolicy& pi,
                         const FeatureMap& features, const InterestFunction& interest,
                         const AgentConfig& agent, const Eigen::VectorXd& w0, long steps,
                         int eval_points, std::uint64_t seed) {
  agent.validate();
  if (algorithm_is_control(agent.algorithm))
    throw std::invalid_argument("run_prediction: control algorithm passed to prediction runner");
  validate_behavior(mdp, mu);
  pi.validate();
  interest.validate();
  if (features.rows() != mdp.n_states || interest.values.size() != mdp.n_states)
    throw std::invalid_argument("run_prediction: state-indexed inputs have wrong size");

  const Eigen::VectorXd v_pi = closed_form_values(mdp, pi);
  const Eigen::VectorXd d_mu = stationary_distribution(state_transition_matrix(mdp, mu)).dist;

  RunRecord record;
  record.seed = seed;
  record.metric = "rmsve";
  record.extra["initial_metric"] = rmsve(w0, features, v_pi, d_mu);
  record.extra["full_column_rank"] = features.has_full_column_rank() ? 1.0 : 0.0;

  TraceEngine engine(agent.trace_config(mdp.discount, TraceIndexing::Prediction));
  Eigen::VectorXd w = w0;
  Eigen::VectorXd w_prev = w0;
  Rng rng(mix_seed(seed, 0x9dd0f8a5ULL));
  int state = sample_initial_state(mdp, rng);

  const std::vector<long> evals = eval_schedule(steps, eval_points);
  std::size_t next_eval = 0;
  double frozen = record.extra["initial_metric"];

  for (long t = 0; t < steps && !record.diverged; ++t) {
    const Transition tr = sample_step(mdp, mu, state, rng);
    const double rho = pi.probs(state, tr.action) / mu.probs(state, tr.action);
    const double trace = agent.algorithm == Algorithm::OffPolicyTD
                             ? 1.0
                             : engine.push(rho, interest.values(state));
    w_prev = w;
    prediction_step(w, features, mdp.discount, state, tr.reward, tr.next_state, trace, rho,
                    agent.learning_rate.at(t), agent.projection_radius);
    state = tr.next_state;
    if (!weights_ok(w)) {
      record.diverged = true;
      w = w_prev;
      frozen = rmsve(w, features, v_pi, d_mu);
    }
    while (next_eval < evals.size() && evals[next_eval] == t + 1) {
      record.values.emplace_back(t + 1, record.diverged ? frozen : rmsve(w, features, v_pi, d_mu));
      ++next_eval;
    }
  }
  // Divergence cut the loop short: repeat the last finite metric forward.
  while (next_eval < evals.size()) {
    record.values.emplace_back(evals[next_eval], frozen);
    ++next_eval;
  }
  record.final_weights = w;
  return record;
}

RunRecord run_control(const TabularMdp& mdp, const FeatureMap& sa_features,
                      const InterestFunction& sa_interest, const SoftmaxPolicySpec& behavior,
                      const SoftmaxPolicySpec& target, const AgentConfig& agent,
                      const Eigen::VectorXd& w0, long steps, int eval_points, std::uint64_t seed) {
  agent.validate();
  if (!algorithm_is_control(agent.algorithm))
    throw std::invalid_argument("run_control: prediction algorithm passed to control runner");
  behavior.validate();
  target.validate();
  sa_interest.validate();
  const int pairs = mdp.n_states * mdp.n_actions;
  if (sa_features.rows() != pairs || sa_interest.values.size() != pairs)
    throw std::invalid_argument("run_control: pair-indexed inputs have wrong size");

  const bool recompute_ratios = agent.algorithm == Algorithm::TruncatedEmphaticExpectedSarsa;
  const TraceConfig trace_cfg = agent.trace_config(mdp.discount, TraceIndexing::Control);
  TraceEngine engine(trace_cfg);

  RunRecord record;
  record.seed = seed;
  record.metric = "weight_norm";
  record.extra["initial_metric"] = w0.norm();
  record.extra["full_column_rank"] = sa_features.has_full_column_rank() ? 1.0 : 0.0;

  Eigen::VectorXd w = w0;
  Eigen::VectorXd w_prev = w0;
  Rng rng(mix_seed(seed, 0xc0417801ULL));
  int state = sample_initial_state(mdp, rng);

  TabularPolicy mu_w =
      softmax_policy_from_weights(w, sa_features, behavior, mdp.n_states, mdp.n_actions);
  validate_behavior(mdp, mu_w);
  std::vector<double> row(mdp.n_actions);
  for (int a = 0; a < mdp.n_actions; ++a) row[a] = mu_w.probs(state, a);
  int action = rng.categorical(row);

  // (state, action) history for the ratio-recomputing variant.
  std::deque<std::pair<int, int>> window;

  const std::vector<long> evals = eval_schedule(steps, eval_points);
  std::size_t next_eval = 0;
  double frozen = record.extra["initial_metric"];

  for (long t = 0; t < steps && !record.diverged; ++t) {
    const double reward = mdp.reward(state, action);
    std::vector<double> next_probs(mdp.n_states);
    for (int s2 = 0; s2 < mdp.n_states; ++s2) next_probs[s2] = mdp.p(state, action, s2);
    const int next_state = rng.categorical(next_probs);

    const TabularPolicy pi_w =
        softmax_policy_from_weights(w, sa_features, target, mdp.n_states, mdp.n_actions);
    mu_w = softmax_policy_from_weights(w, sa_features, behavior, mdp.n_states, mdp.n_actions);

    for (int a = 0; a < mdp.n_actions; ++a) row[a] = mu_w.probs(next_state, a);
    const int next_action = rng.categorical(row);

    double trace;
    if (recompute_ratios) {
      window.emplace_back(state, action);
      if (static_cast<int>(window.size()) > agent.truncation + 1) window.pop_front();
      std::vector<RhoInterest> pairs_window;
      pairs_window.reserve(window.size());
      for (const auto& [s_k, a_k] : window)
        pairs_window.push_back({pi_w.probs(s_k, a_k) / mu_w.probs(s_k, a_k),
                                sa_interest.values(pair_index(s_k, a_k, mdp.n_actions))});
      trace = trace_window_recompute(pairs_window, mdp.discount, TraceIndexing::Control);
    } else {
      const double rho = pi_w.probs(state, action) / mu_w.probs(state, action);
      trace = engine.push(rho, sa_interest.values(pair_index(state, action, mdp.n_actions)));
    }

    w_prev = w;
    expected_sarsa_step(w, sa_features, mdp.n_actions, mdp.discount, state, action, reward,
                        next_state, pi_w.probs.row(next_state).transpose(), trace,
                        agent.learning_rate.at(t), agent.projection_radius);
    state = next_state;
    action = next_action;
    if (!weights_ok(w)) {
      record.diverged = true;
      w = w_prev;
      frozen = w.norm();
    }
    while (next_eval < evals.size() && evals[next_eval] == t + 1) {
      record.values.emplace_back(t + 1, record.diverged ? frozen : w.norm());
      ++next_eval;
    }
  }
  while (next_eval < evals.size()) {
    record.values.emplace_back(evals[next_eval], frozen);
    ++next_eval;
  }
  record.final_weights = w;
  return record;
}

}  // namespace tetd
