#include "tetd/analysis.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "tetd/rng.hpp"

namespace tetd {

namespace {

constexpr double kNdEigenTol = 1e-12;

// Smallest n >= 0 with gamma^{n+1} < rhs, robust to rounding in the analytic
// candidate ln(rhs)/ln(gamma) - 1.
long smallest_n_for(double gamma, double rhs) {
  if (rhs <= 0.0) throw std::runtime_error("truncation condition: nonpositive right-hand side");
  if (gamma == 0.0 || rhs >= 1.0) return 0;
  const double x = std::log(rhs) / std::log(gamma) - 1.0;
  long n = std::max<long>(0, static_cast<long>(std::floor(x)) + 1);
  while (std::pow(gamma, static_cast<double>(n) + 1.0) >= rhs) ++n;
  while (n > 0 && std::pow(gamma, static_cast<double>(n)) < rhs) --n;
  return n;
}

MatrixXd symmetric_part(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

void EmphasisInputs::validate() const {
  const int n = size();
  if (p_pi.rows() != n || p_pi.cols() != n || interest.size() != n)
    throw std::invalid_argument("EmphasisInputs: shape mismatch");
  if (d_mu.minCoeff() <= 0.0)
    throw std::invalid_argument("EmphasisInputs: stationary distribution must be positive");
  if (interest.minCoeff() <= 0.0)
    throw std::invalid_argument("EmphasisInputs: interest must be strictly positive");
  if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("EmphasisInputs: bad discount");
}

EmphasisInputs prediction_inputs(const TabularMdp& mdp, const TabularPolicy& mu,
                                 const TabularPolicy& pi, const InterestFunction& interest) {
  EmphasisInputs in;
  in.p_pi = state_transition_matrix(mdp, pi);
  in.d_mu = stationary_distribution(state_transition_matrix(mdp, mu)).dist;
  in.interest = interest.values;
  in.gamma = mdp.discount;
  in.validate();
  return in;
}

EmphasisInputs control_inputs(const TabularMdp& mdp, const TabularPolicy& mu,
                              const TabularPolicy& pi, const InterestFunction& interest) {
  EmphasisInputs in;
  in.p_pi = state_action_transition_matrix(mdp, pi);
  in.d_mu = state_action_stationary_distribution(mdp, mu).dist;
  in.interest = interest.values;
  in.gamma = mdp.discount;
  in.validate();
  return in;
}

VectorXd emphasis_weighting(const EmphasisInputs& in, long n) {
  // f_n = sum_{j=0}^n gamma^j (P^T)^j D_mu i, never forming matrix powers.
  VectorXd term = in.d_mu.cwiseProduct(in.interest);
  VectorXd acc = term;
  for (long j = 1; j <= n; ++j) {
    term = in.gamma * (in.p_pi.transpose() * term);
    acc += term;
  }
  return acc;
}

VectorXd truncated_emphasis(const EmphasisInputs& in, long n) {
  if (n < 0) throw std::invalid_argument("truncated_emphasis: n must be nonnegative");
  return emphasis_weighting(in, n).cwiseQuotient(in.d_mu);
}

VectorXd emphasis_weighting_limit(const EmphasisInputs& in) {
  const int n = in.size();
  const MatrixXd a = MatrixXd::Identity(n, n) - in.gamma * in.p_pi.transpose();
  return a.partialPivLu().solve(in.d_mu.cwiseProduct(in.interest));
}

VectorXd emphasis_limit(const EmphasisInputs& in) {
  return emphasis_weighting_limit(in).cwiseQuotient(in.d_mu);
}

EmphasisTailBounds emphasis_tail_bounds(const EmphasisInputs& in, long n) {
  const VectorXd m_n = truncated_emphasis(in, n);
  const VectorXd m = emphasis_limit(in);
  const VectorXd f_n = emphasis_weighting(in, n);
  const VectorXd f = emphasis_weighting_limit(in);
  const double d_max = in.d_mu.maxCoeff();
  const double d_min = in.d_mu.minCoeff();
  const double tail = std::pow(in.gamma, static_cast<double>(n) + 1.0) * m.lpNorm<1>();
  EmphasisTailBounds out;
  out.bound_l1 = tail * d_max / d_min;
  out.bound_inf = tail * d_max * d_max / d_min;
  out.gap_l1 = (m_n - m).lpNorm<1>();
  out.gap_inf = (f_n - f).lpNorm<Eigen::Infinity>();
  return out;
}

namespace {
std::pair<MatrixXd, VectorXd> update_from_weighting(const EmphasisInputs& in,
                                                    const FeatureMap& features,
                                                    const VectorXd& reward, const VectorXd& f) {
  if (features.rows() != in.size() || reward.size() != in.size())
    throw std::invalid_argument("expected_update: feature/reward shape mismatch");
  const MatrixXd& x = features.matrix();
  const MatrixXd weighted = f.asDiagonal() * (in.gamma * in.p_pi * x - x);
  return {x.transpose() * weighted, x.transpose() * (f.asDiagonal() * reward)};
}
}  // namespace

std::pair<MatrixXd, VectorXd> expected_update(const EmphasisInputs& in, const FeatureMap& features,
                                              const VectorXd& reward, long n) {
  return update_from_weighting(in, features, reward, emphasis_weighting(in, n));
}

std::pair<MatrixXd, VectorXd> expected_update_limit(const EmphasisInputs& in,
                                                    const FeatureMap& features,
                                                    const VectorXd& reward) {
  return update_from_weighting(in, features, reward, emphasis_weighting_limit(in));
}

VectorXd fixed_point(const MatrixXd& a, const VectorXd& b) {
  Eigen::FullPivLU<MatrixXd> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible())
    throw std::runtime_error(
        "fixed_point: A_n is singular; the negative-definiteness precondition does not hold");
  const VectorXd w = lu.solve(-b);
  const double residual = (a * w + b).norm();
  if (residual > 1e-9 * (1.0 + b.norm()))
    throw std::runtime_error("fixed_point: solve residual exceeds tolerance");
  return w;
}

bool is_negative_definite(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("is_negative_definite: not square");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetric_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() < -kNdEigenTol;
}

double spectral_norm(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.transpose() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double inf_norm(const MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

double update_matrix_lambda_min(const EmphasisInputs& in) {
  const int n = in.size();
  const VectorXd f = emphasis_weighting_limit(in);
  const MatrixXd i_minus = MatrixXd::Identity(n, n) - in.gamma * in.p_pi;
  const MatrixXd m = 0.5 * (f.asDiagonal() * i_minus + i_minus.transpose() * f.asDiagonal());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

NdThreshold min_n_negative_definite(const EmphasisInputs& in, const FeatureMap* features) {
  const int s = in.size();
  NdThreshold out{};
  out.lambda_min = update_matrix_lambda_min(in);
  const MatrixXd shift = in.gamma * in.p_pi - MatrixXd::Identity(s, s);
  out.norm_term = spectral_norm(shift);
  const double m_l1 = emphasis_limit(in).lpNorm<1>();
  const double d_max = in.d_mu.maxCoeff();
  const double d_min = in.d_mu.minCoeff();
  out.rhs = out.lambda_min * d_min / (d_max * d_max * out.norm_term * m_l1);
  out.n_bound = smallest_n_for(in.gamma, out.rhs);

  out.scanned_features = features != nullptr && features->has_full_column_rank();
  VectorXd term = in.d_mu.cwiseProduct(in.interest);
  VectorXd f_acc = term;
  out.n_actual = out.n_bound;
  for (long n = 0; n <= out.n_bound; ++n) {
    if (n > 0) {
      term = in.gamma * (in.p_pi.transpose() * term);
      f_acc += term;
    }
    MatrixXd candidate = f_acc.asDiagonal() * shift;
    if (out.scanned_features)
      candidate = features->matrix().transpose() * candidate * features->matrix();
    if (is_negative_definite(candidate)) {
      out.n_actual = n;
      break;
    }
  }
  return out;
}

ContractionThreshold min_n_contraction(const EmphasisInputs& in) {
  const int s = in.size();
  ContractionThreshold out{};
  const VectorXd f = emphasis_weighting_limit(in);
  const VectorXd di = in.d_mu.cwiseProduct(in.interest);
  out.kappa = (di.cwiseQuotient(f)).minCoeff();
  out.norm_term =
      inf_norm(MatrixXd::Identity(s, s) - in.gamma * in.p_pi.transpose());
  const double m_l1 = emphasis_limit(in).lpNorm<1>();
  const double d_max = in.d_mu.maxCoeff();
  const double d_min = in.d_mu.minCoeff();
  out.rhs = out.kappa * d_min * di.minCoeff() / (d_max * d_max * out.norm_term * m_l1);
  out.n_bound = smallest_n_for(in.gamma, out.rhs);
  return out;
}

std::pair<double, double> selection_helpers_n1_n2(const EmphasisInputs& in) {
  if (in.gamma == 0.0) return {-1.0, -1.0};
  const NdThreshold nd = min_n_negative_definite(in, nullptr);
  const ContractionThreshold ct = min_n_contraction(in);
  const double lg = std::log(in.gamma);
  return {std::log(nd.rhs) / lg - 1.0, std::log(ct.rhs) / lg - 1.0};
}

MatrixXd projection_matrix(const FeatureMap& features, const VectorXd& f) {
  features.require_full_column_rank("projection_matrix");
  if (f.minCoeff() <= 0.0)
    throw std::invalid_argument("projection_matrix: weighting must be strictly positive");
  const MatrixXd& x = features.matrix();
  const MatrixXd gram = x.transpose() * f.asDiagonal() * x;
  return x * gram.partialPivLu().solve(x.transpose() * f.asDiagonal());
}

double contraction_factor_estimate(const EmphasisInputs& in, const FeatureMap& features, long n,
                                   int n_pairs, std::uint64_t seed, bool parallel) {
  const int s = in.size();
  const VectorXd f_n = emphasis_weighting(in, n);
  const MatrixXd map = projection_matrix(features, f_n) * (in.gamma * in.p_pi);
  const VectorXd sqrt_f = f_n.cwiseSqrt();

  // Difference vectors of random pairs, drawn once so both execution paths
  // see identical inputs.
  MatrixXd diffs(s, n_pairs);
  Rng rng(mix_seed(seed, 0xc0117ac7));
  for (int c = 0; c < n_pairs; ++c)
    for (int r = 0; r < s; ++r) diffs(r, c) = rng.uniform(-1.0, 1.0) - rng.uniform(-1.0, 1.0);

  double worst = 0.0;
  if (parallel) {
    // Blocked so the mapped intermediate stays cache-resident.
    constexpr int kBlock = 1024;
    const int blocks = (n_pairs + kBlock - 1) / kBlock;
#pragma omp parallel for reduction(max : worst) schedule(static)
    for (int b = 0; b < blocks; ++b) {
      const int lo = b * kBlock;
      const int width = std::min(kBlock, n_pairs - lo);
      const MatrixXd mapped = map * diffs.middleCols(lo, width);
      for (int c = 0; c < width; ++c) {
        const double denom = sqrt_f.cwiseProduct(diffs.col(lo + c)).norm();
        if (denom == 0.0) continue;
        const double numer = sqrt_f.cwiseProduct(mapped.col(c)).norm();
        worst = std::max(worst, numer / denom);
      }
    }
  } else {
    for (int c = 0; c < n_pairs; ++c) {
      const VectorXd mapped = map * diffs.col(c);
      const double denom = sqrt_f.cwiseProduct(diffs.col(c)).norm();
      if (denom == 0.0) continue;
      worst = std::max(worst, sqrt_f.cwiseProduct(mapped).norm() / denom);
    }
  }
  return worst;
}

EmphasisReport analyze_emphasis(const EmphasisInputs& in, const FeatureMap& features,
                                const VectorXd& reward, long n, int contraction_pairs,
                                std::uint64_t seed) {
  EmphasisReport rep;
  rep.n = n;
  rep.m_n = truncated_emphasis(in, n);
  rep.m = emphasis_limit(in);
  rep.f_n = emphasis_weighting(in, n);
  rep.f = emphasis_weighting_limit(in);
  const EmphasisTailBounds bounds = emphasis_tail_bounds(in, n);
  rep.bound_l1 = bounds.bound_l1;
  rep.bound_inf = bounds.bound_inf;
  rep.gap_l1 = bounds.gap_l1;
  rep.gap_inf = bounds.gap_inf;
  auto [a_n, b_n] = expected_update(in, features, reward, n);
  rep.a_n = a_n;
  rep.b_n = b_n;
  try {
    rep.w_star_n = fixed_point(a_n, b_n);
  } catch (const std::runtime_error&) {
    rep.w_star_n.reset();
  }
  const NdThreshold nd = min_n_negative_definite(in, &features);
  rep.lambda_min = nd.lambda_min;
  rep.spectral_norm_term = nd.norm_term;
  rep.min_n_nd_bound = nd.n_bound;
  rep.min_n_nd_actual = nd.n_actual;
  rep.nd_scan_on_features = nd.scanned_features;
  const ContractionThreshold ct = min_n_contraction(in);
  rep.kappa = ct.kappa;
  rep.inf_norm_term = ct.norm_term;
  rep.min_n_contract_bound = ct.n_bound;
  std::tie(rep.n1, rep.n2) = selection_helpers_n1_n2(in);
  if (features.has_full_column_rank())
    rep.contraction_estimate = contraction_factor_estimate(in, features, n, contraction_pairs, seed);
  return rep;
}

namespace {
nlohmann::json vec_to_json(const VectorXd& v) {
  auto arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

VectorXd vec_from_json(const nlohmann::json& j) {
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j.at(i).get<double>();
  return v;
}

nlohmann::json mat_to_json(const MatrixXd& m) {
  auto arr = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    arr.push_back(row);
  }
  return arr;
}

MatrixXd mat_from_json(const nlohmann::json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(j.at(0).size());
  MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  return m;
}
}  // namespace

std::string report_to_json(const EmphasisReport& rep) {
  nlohmann::json j;
  j["n"] = rep.n;
  j["m_n"] = vec_to_json(rep.m_n);
  j["m"] = vec_to_json(rep.m);
  j["f_n"] = vec_to_json(rep.f_n);
  j["f"] = vec_to_json(rep.f);
  j["bound_l1"] = rep.bound_l1;
  j["bound_inf"] = rep.bound_inf;
  j["gap_l1"] = rep.gap_l1;
  j["gap_inf"] = rep.gap_inf;
  j["lambda_min"] = rep.lambda_min;
  j["kappa"] = rep.kappa;
  j["spectral_norm_term"] = rep.spectral_norm_term;
  j["inf_norm_term"] = rep.inf_norm_term;
  j["A_n"] = mat_to_json(rep.a_n);
  j["b_n"] = vec_to_json(rep.b_n);
  if (rep.w_star_n)
    j["w_star_n"] = vec_to_json(*rep.w_star_n);
  else
    j["w_star_n"] = nullptr;
  j["min_n_nd_bound"] = rep.min_n_nd_bound;
  j["min_n_nd_actual"] = rep.min_n_nd_actual;
  j["min_n_contract_bound"] = rep.min_n_contract_bound;
  j["nd_scan_on_features"] = rep.nd_scan_on_features;
  j["n1"] = rep.n1;
  j["n2"] = rep.n2;
  j["contraction_estimate"] = rep.contraction_estimate;
  return j.dump(2);
}

EmphasisReport report_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  EmphasisReport rep;
  rep.n = j.at("n").get<long>();
  rep.m_n = vec_from_json(j.at("m_n"));
  rep.m = vec_from_json(j.at("m"));
  rep.f_n = vec_from_json(j.at("f_n"));
  rep.f = vec_from_json(j.at("f"));
  rep.bound_l1 = j.at("bound_l1").get<double>();
  rep.bound_inf = j.at("bound_inf").get<double>();
  rep.gap_l1 = j.at("gap_l1").get<double>();
  rep.gap_inf = j.at("gap_inf").get<double>();
  rep.lambda_min = j.at("lambda_min").get<double>();
  rep.kappa = j.at("kappa").get<double>();
  rep.spectral_norm_term = j.at("spectral_norm_term").get<double>();
  rep.inf_norm_term = j.at("inf_norm_term").get<double>();
  rep.a_n = mat_from_json(j.at("A_n"));
  rep.b_n = vec_from_json(j.at("b_n"));
  if (!j.at("w_star_n").is_null()) rep.w_star_n = vec_from_json(j.at("w_star_n"));
  rep.min_n_nd_bound = j.at("min_n_nd_bound").get<long>();
  rep.min_n_nd_actual = j.at("min_n_nd_actual").get<long>();
  rep.min_n_contract_bound = j.at("min_n_contract_bound").get<long>();
  rep.nd_scan_on_features = j.at("nd_scan_on_features").get<bool>();
  rep.n1 = j.at("n1").get<double>();
  rep.n2 = j.at("n2").get<double>();
  rep.contraction_estimate = j.at("contraction_estimate").get<double>();
  return rep;
}

}  // namespace tetd
