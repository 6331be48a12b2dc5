#include "tetd/mdp.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tetd {

namespace {
constexpr double kRowSumTol = 1e-12;
constexpr double kStationaryResidualTol = 1e-10;
constexpr double kPositiveTol = 1e-14;
}  // namespace

void TabularMdp::validate() const {
  if (n_states <= 0 || n_actions <= 0)
    throw std::invalid_argument("TabularMdp: state and action counts must be positive");
  if (static_cast<int>(transition.size()) != n_states)
    throw std::invalid_argument("TabularMdp: transition tensor has wrong state count");
  for (int s = 0; s < n_states; ++s) {
    const MatrixXd& block = transition[s];
    if (block.rows() != n_actions || block.cols() != n_states)
      throw std::invalid_argument("TabularMdp: transition block shape mismatch");
    for (int a = 0; a < n_actions; ++a) {
      if (block.row(a).minCoeff() < 0.0)
        throw std::invalid_argument("TabularMdp: negative transition probability");
      if (std::abs(block.row(a).sum() - 1.0) > kRowSumTol)
        throw std::invalid_argument("TabularMdp: transition row does not sum to 1");
    }
  }
  if (reward.rows() != n_states || reward.cols() != n_actions)
    throw std::invalid_argument("TabularMdp: reward shape mismatch");
  if (discount < 0.0 || discount >= 1.0)
    throw std::invalid_argument("TabularMdp: discount must lie in [0, 1)");
  if (initial_dist.size() != n_states || initial_dist.minCoeff() < 0.0 ||
      std::abs(initial_dist.sum() - 1.0) > kRowSumTol)
    throw std::invalid_argument("TabularMdp: initial distribution is not a probability vector");
}

void TabularPolicy::validate() const {
  for (int s = 0; s < probs.rows(); ++s) {
    if (probs.row(s).minCoeff() < 0.0)
      throw std::invalid_argument("TabularPolicy: negative action probability");
    if (std::abs(probs.row(s).sum() - 1.0) > kRowSumTol)
      throw std::invalid_argument("TabularPolicy: row does not sum to 1");
  }
}

void InterestFunction::validate() const {
  if (values.size() == 0 || values.minCoeff() <= 0.0)
    throw std::invalid_argument("InterestFunction: entries must be strictly positive");
}

MatrixXd state_transition_matrix(const TabularMdp& mdp, const TabularPolicy& policy) {
  if (policy.n_states() != mdp.n_states || policy.n_actions() != mdp.n_actions)
    throw std::invalid_argument("state_transition_matrix: policy shape mismatch");
  MatrixXd out = MatrixXd::Zero(mdp.n_states, mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a)
      out.row(s) += policy.probs(s, a) * mdp.transition[s].row(a);
  return out;
}

MatrixXd state_action_transition_matrix(const TabularMdp& mdp, const TabularPolicy& policy) {
  if (policy.n_states() != mdp.n_states || policy.n_actions() != mdp.n_actions)
    throw std::invalid_argument("state_action_transition_matrix: policy shape mismatch");
  const int n = mdp.n_states * mdp.n_actions;
  MatrixXd out = MatrixXd::Zero(n, n);
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a)
      for (int s2 = 0; s2 < mdp.n_states; ++s2)
        for (int a2 = 0; a2 < mdp.n_actions; ++a2)
          out(pair_index(s, a, mdp.n_actions), pair_index(s2, a2, mdp.n_actions)) =
              mdp.p(s, a, s2) * policy.probs(s2, a2);
  return out;
}

VectorXd state_action_reward(const TabularMdp& mdp) {
  VectorXd r(mdp.n_states * mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a) r(pair_index(s, a, mdp.n_actions)) = mdp.reward(s, a);
  return r;
}

VectorXd policy_reward(const TabularMdp& mdp, const TabularPolicy& policy) {
  VectorXd r = VectorXd::Zero(mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s)
    r(s) = mdp.reward.row(s).dot(policy.probs.row(s));
  return r;
}

VectorXd closed_form_values(const TabularMdp& mdp, const TabularPolicy& policy) {
  const MatrixXd p_pi = state_transition_matrix(mdp, policy);
  const MatrixXd a = MatrixXd::Identity(mdp.n_states, mdp.n_states) - mdp.discount * p_pi;
  return a.partialPivLu().solve(policy_reward(mdp, policy));
}

StationaryDistribution stationary_distribution(const MatrixXd& transition) {
  const int n = static_cast<int>(transition.rows());
  if (transition.cols() != n) throw std::invalid_argument("stationary_distribution: not square");

  VectorXd d = VectorXd::Constant(n, 1.0 / n);
  bool converged = false;
  const MatrixXd pt = transition.transpose();
  for (long it = 0; it < 1000000; ++it) {
    VectorXd next = pt * d;
    next /= next.sum();
    const double change = (next - d).lpNorm<Eigen::Infinity>();
    d = next;
    if (change < 1e-12) {
      converged = true;
      break;
    }
  }

  auto residual = [&](const VectorXd& v) { return (pt * v - v).lpNorm<Eigen::Infinity>(); };

  if (!converged || residual(d) > kStationaryResidualTol) {
    // Dense fallback: (P^T - I)d = 0 with the normalization row appended.
    MatrixXd a = pt - MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    VectorXd rhs = VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    d = a.partialPivLu().solve(rhs);
    if (residual(d) > kStationaryResidualTol)
      throw std::runtime_error("stationary_distribution: no invariant distribution found");
  }

  if (d.minCoeff() < kPositiveTol)
    throw std::runtime_error(
        "stationary_distribution: chain is not ergodic (stationary mass vanishes on some state)");

  // A second eigenvalue on the unit circle means the chain is reducible or
  // periodic, so the long-run distribution is not unique or not reached.
  Eigen::EigenSolver<MatrixXd> es(transition, false);
  int on_circle = 0;
  for (int k = 0; k < n; ++k)
    if (std::abs(es.eigenvalues()(k)) > 1.0 - 1e-10) ++on_circle;
  if (on_circle != 1)
    throw std::runtime_error("stationary_distribution: chain is not ergodic (unit-circle eigenvalue multiplicity)");

  return {d};
}

StationaryDistribution state_action_stationary_distribution(const TabularMdp& mdp,
                                                            const TabularPolicy& mu) {
  const StationaryDistribution ds = stationary_distribution(state_transition_matrix(mdp, mu));
  VectorXd d(mdp.n_states * mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a)
      d(pair_index(s, a, mdp.n_actions)) = ds.dist(s) * mu.probs(s, a);
  return {d};
}

Transition sample_step(const TabularMdp& mdp, const TabularPolicy& policy, int state, Rng& rng) {
  if (state < 0 || state >= mdp.n_states) throw std::out_of_range("sample_step: bad state index");
  std::vector<double> probs(mdp.n_actions);
  for (int a = 0; a < mdp.n_actions; ++a) probs[a] = policy.probs(state, a);
  const int action = rng.categorical(probs);

  std::vector<double> next_probs(mdp.n_states);
  for (int s2 = 0; s2 < mdp.n_states; ++s2) next_probs[s2] = mdp.p(state, action, s2);
  const int next_state = rng.categorical(next_probs);

  return {action, mdp.reward(state, action), next_state};
}

int sample_initial_state(const TabularMdp& mdp, Rng& rng) {
  std::vector<double> p(mdp.initial_dist.data(), mdp.initial_dist.data() + mdp.n_states);
  return rng.categorical(p);
}

void validate_behavior(const TabularMdp& mdp, const TabularPolicy& mu) {
  mu.validate();
  if (mu.probs.minCoeff() <= 0.0)
    throw std::invalid_argument("validate_behavior: coverage violated, mu(a|s) = 0 for some pair");
  stationary_distribution(state_transition_matrix(mdp, mu));  // throws when not ergodic
}

TabularMdp parse_mdp_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  TabularMdp mdp;
  mdp.n_states = j.at("n_states").get<int>();
  mdp.n_actions = j.at("n_actions").get<int>();
  mdp.transition.assign(mdp.n_states, MatrixXd::Zero(mdp.n_actions, mdp.n_states));
  const auto& t = j.at("transition");
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a)
      for (int s2 = 0; s2 < mdp.n_states; ++s2)
        mdp.transition[s](a, s2) = t.at(s).at(a).at(s2).get<double>();
  mdp.reward.resize(mdp.n_states, mdp.n_actions);
  const auto& r = j.at("reward");
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a) mdp.reward(s, a) = r.at(s).at(a).get<double>();
  mdp.discount = j.at("discount").get<double>();
  mdp.initial_dist.resize(mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s) mdp.initial_dist(s) = j.at("initial_dist").at(s).get<double>();
  mdp.validate();
  return mdp;
}

TabularMdp load_mdp_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mdp_json: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mdp_json(ss.str());
}

std::string mdp_to_json(const TabularMdp& mdp) {
  nlohmann::json j;
  j["n_states"] = mdp.n_states;
  j["n_actions"] = mdp.n_actions;
  auto t = nlohmann::json::array();
  for (int s = 0; s < mdp.n_states; ++s) {
    auto rows = nlohmann::json::array();
    for (int a = 0; a < mdp.n_actions; ++a) {
      auto row = nlohmann::json::array();
      for (int s2 = 0; s2 < mdp.n_states; ++s2) row.push_back(mdp.transition[s](a, s2));
      rows.push_back(row);
    }
    t.push_back(rows);
  }
  j["transition"] = t;
  auto r = nlohmann::json::array();
  for (int s = 0; s < mdp.n_states; ++s) {
    auto row = nlohmann::json::array();
    for (int a = 0; a < mdp.n_actions; ++a) row.push_back(mdp.reward(s, a));
    r.push_back(row);
  }
  j["reward"] = r;
  j["discount"] = mdp.discount;
  auto p0 = nlohmann::json::array();
  for (int s = 0; s < mdp.n_states; ++s) p0.push_back(mdp.initial_dist(s));
  j["initial_dist"] = p0;
  return j.dump(2);
}

}  // namespace tetd
