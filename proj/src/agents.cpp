#include "tetd/agents.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tetd/mdp.hpp"

namespace tetd {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::OffPolicyTD: return "off-policy-td";
    case Algorithm::Etd0Full: return "etd0";
    case Algorithm::TruncatedEtd: return "truncated-etd";
    case Algorithm::EtdBeta: return "etd-beta";
    case Algorithm::ProjectedTruncatedEtd: return "projected-truncated-etd";
    case Algorithm::TruncatedEmphaticExpectedSarsa: return "emphatic-expected-sarsa";
    case Algorithm::ProjectedTruncatedEmphaticExpectedSarsa:
      return "projected-emphatic-expected-sarsa";
    case Algorithm::ProjectedEmphaticExpectedSarsaBeta:
      return "projected-emphatic-expected-sarsa-beta";
  }
  throw std::logic_error("algorithm_name: unreachable");
}

Algorithm algorithm_from_name(const std::string& name) {
  for (Algorithm a :
       {Algorithm::OffPolicyTD, Algorithm::Etd0Full, Algorithm::TruncatedEtd, Algorithm::EtdBeta,
        Algorithm::ProjectedTruncatedEtd, Algorithm::TruncatedEmphaticExpectedSarsa,
        Algorithm::ProjectedTruncatedEmphaticExpectedSarsa,
        Algorithm::ProjectedEmphaticExpectedSarsaBeta})
    if (algorithm_name(a) == name) return a;
  throw std::invalid_argument("unknown algorithm: " + name);
}

bool algorithm_is_control(Algorithm a) {
  return a == Algorithm::TruncatedEmphaticExpectedSarsa ||
         a == Algorithm::ProjectedTruncatedEmphaticExpectedSarsa ||
         a == Algorithm::ProjectedEmphaticExpectedSarsaBeta;
}

void LearningRate::validate() const {
  if (kind == Kind::Constant && alpha <= 0.0)
    throw std::invalid_argument("LearningRate: alpha must be positive");
  if (kind == Kind::InverseT && alpha_lambda <= 0.0)
    throw std::invalid_argument("LearningRate: alpha_lambda must be positive");
}

void AgentConfig::validate() const {
  learning_rate.validate();
  if (projection_radius <= 0.0)
    throw std::invalid_argument("AgentConfig: projection radius must be positive");
  const bool soft = algorithm == Algorithm::EtdBeta ||
                    algorithm == Algorithm::ProjectedEmphaticExpectedSarsaBeta;
  if (soft && (beta <= 0.0 || beta >= 1.0))
    throw std::invalid_argument("AgentConfig: beta must lie in (0, 1)");
  if (!soft && truncation < kInfiniteTruncation)
    throw std::invalid_argument("AgentConfig: bad truncation length");
  if (algorithm == Algorithm::TruncatedEmphaticExpectedSarsa && truncation == kInfiniteTruncation)
    throw std::invalid_argument(
        "AgentConfig: the ratio-recomputing learner needs a finite window; use the projected "
        "variant for the untruncated trace");
}

TraceConfig AgentConfig::trace_config(double gamma, TraceIndexing indexing) const {
  switch (algorithm) {
    case Algorithm::OffPolicyTD:
      return TraceConfig::hard(0, gamma, indexing);  // F == i, never consulted
    case Algorithm::Etd0Full:
      return TraceConfig::full(gamma, indexing);
    case Algorithm::EtdBeta:
      return TraceConfig::soft(beta, indexing);
    case Algorithm::ProjectedEmphaticExpectedSarsaBeta:
      return TraceConfig::soft(beta, indexing);
    case Algorithm::TruncatedEtd:
    case Algorithm::ProjectedTruncatedEtd:
    case Algorithm::TruncatedEmphaticExpectedSarsa:
    case Algorithm::ProjectedTruncatedEmphaticExpectedSarsa:
      if (truncation == kInfiniteTruncation) return TraceConfig::full(gamma, indexing);
      return TraceConfig::hard(truncation, gamma, indexing, incremental_trace);
  }
  throw std::logic_error("trace_config: unreachable");
}

std::string AgentConfig::label() const {
  std::ostringstream os;
  os << algorithm_name(algorithm);
  switch (algorithm) {
    case Algorithm::EtdBeta:
    case Algorithm::ProjectedEmphaticExpectedSarsaBeta:
      os << "_beta" << beta;
      break;
    case Algorithm::TruncatedEtd:
    case Algorithm::ProjectedTruncatedEtd:
    case Algorithm::TruncatedEmphaticExpectedSarsa:
    case Algorithm::ProjectedTruncatedEmphaticExpectedSarsa:
      if (truncation == kInfiniteTruncation)
        os << "_ninf";
      else
        os << "_n" << truncation;
      break;
    default:
      break;
  }
  return os.str();
}

double prediction_step(Eigen::VectorXd& w, const FeatureMap& features, double gamma, int state,
                       double reward, int next_state, double trace, double rho, double alpha,
                       double projection_radius) {
  const double v = features.value(state, w);
  const double v_next = features.value(next_state, w);
  const double td_error = reward + gamma * v_next - v;
  w += alpha * trace * rho * td_error * features.row(state);
  if (std::isfinite(projection_radius)) w = project_ball(std::move(w), projection_radius);
  return td_error;
}

double expected_sarsa_step(Eigen::VectorXd& w, const FeatureMap& features, int n_actions,
                           double gamma, int state, int action, double reward, int next_state,
                           const Eigen::VectorXd& target_row, double trace, double alpha,
                           double projection_radius) {
  double expected_next = 0.0;
  for (int a = 0; a < n_actions; ++a)
    expected_next += target_row(a) * features.value(pair_index(next_state, a, n_actions), w);
  const int row = pair_index(state, action, n_actions);
  const double td_error = reward + gamma * expected_next - features.value(row, w);
  w += alpha * trace * td_error * features.row(row);
  if (std::isfinite(projection_radius)) w = project_ball(std::move(w), projection_radius);
  return td_error;
}

}  // namespace tetd
