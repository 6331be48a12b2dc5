#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>

#include "tetd/features.hpp"
#include "tetd/mdp.hpp"

namespace tetd {

// Chain-level inputs shared by the prediction (state-indexed) and control
// (state-action-indexed) overloads of every emphasis quantity. Build one with
// prediction_inputs or control_inputs and all downstream formulas apply
// unchanged.
struct EmphasisInputs {
  MatrixXd p_pi;      // target-policy transition matrix over the index set
  VectorXd d_mu;      // stationary distribution of the behavior chain
  VectorXd interest;  // strictly positive weighting over the index set
  double gamma = 0.0;

  int size() const { return static_cast<int>(d_mu.size()); }
  void validate() const;
};

EmphasisInputs prediction_inputs(const TabularMdp& mdp, const TabularPolicy& mu,
                                 const TabularPolicy& pi, const InterestFunction& interest);
EmphasisInputs control_inputs(const TabularMdp& mdp, const TabularPolicy& mu,
                              const TabularPolicy& pi, const InterestFunction& interest);

// m_n = sum_{j=0}^n gamma^j D_mu^-1 (P_pi^T)^j D_mu i, evaluated by repeated
// matrix-vector products.
VectorXd truncated_emphasis(const EmphasisInputs& in, long n);

// m = D_mu^-1 (I - gamma P_pi^T)^-1 D_mu i.
VectorXd emphasis_limit(const EmphasisInputs& in);

// f_n = D_mu m_n and its limit f = D_mu m.
VectorXd emphasis_weighting(const EmphasisInputs& in, long n);
VectorXd emphasis_weighting_limit(const EmphasisInputs& in);

// Geometric tail bounds on the truncation error:
//   ||m_n - m||_1   <= gamma^{n+1} (d_max / d_min)   ||m||_1
//   ||f_n - f||_inf <= gamma^{n+1} (d_max^2 / d_min) ||m||_1
struct EmphasisTailBounds {
  double bound_l1;
  double bound_inf;
  double gap_l1;   // measured ||m_n - m||_1
  double gap_inf;  // measured ||f_n - f||_inf
};
EmphasisTailBounds emphasis_tail_bounds(const EmphasisInputs& in, long n);

// A_n = X^T D_{f_n} (gamma P_pi - I) X and b_n = X^T D_{f_n} r, with r the
// reward vector over the index set (r_pi for prediction, raw r(s,a) for
// control).
std::pair<MatrixXd, VectorXd> expected_update(const EmphasisInputs& in, const FeatureMap& features,
                                              const VectorXd& reward, long n);
std::pair<MatrixXd, VectorXd> expected_update_limit(const EmphasisInputs& in,
                                                    const FeatureMap& features,
                                                    const VectorXd& reward);

// w = -A^-1 b; throws when A is singular, which signals that the
// negative-definiteness precondition failed.
VectorXd fixed_point(const MatrixXd& a, const VectorXd& b);

// True iff the symmetric part (M + M^T)/2 has all eigenvalues below -1e-12.
bool is_negative_definite(const MatrixXd& m);

// ||M||_2 (largest singular value) and max absolute row sum.
double spectral_norm(const MatrixXd& m);
double inf_norm(const MatrixXd& m);

// Smallest eigenvalue of (1/2)(D_f (I - gamma P) + (I - gamma P^T) D_f) with
// f the untruncated weighting; positive for ergodic chains with coverage.
double update_matrix_lambda_min(const EmphasisInputs& in);

struct NdThreshold {
  long n_bound;         // smallest n satisfying the sufficient condition
  long n_actual;        // smallest n <= n_bound passing the eigen check
  double lambda_min;    // smallest eigenvalue entering the condition
  double rhs;           // right-hand side of the gamma^{n+1} inequality
  double norm_term;     // spectral norm ||gamma P - I||
  bool scanned_features; // eigen scan ran on X^T D (gamma P - I) X
};
// The sufficient truncation length from the negative-definiteness condition,
// plus the empirically minimal one found by scanning upward. The scan runs on
// A_n when the feature map has full column rank and on the core matrix
// D_{f_n}(gamma P - I) otherwise.
NdThreshold min_n_negative_definite(const EmphasisInputs& in, const FeatureMap* features);

struct ContractionThreshold {
  long n_bound;
  double kappa;      // min_s d(s) i(s) / f(s)
  double rhs;
  double norm_term;  // ||I - gamma P^T||_inf
};
ContractionThreshold min_n_contraction(const EmphasisInputs& in);

// Log-ratio forms of the two truncation conditions; n strictly above both
// satisfies them. Returns -1 when gamma = 0 (any n >= 0 works).
std::pair<double, double> selection_helpers_n1_n2(const EmphasisInputs& in);

// Pi_f = X (X^T D_f X)^-1 X^T D_f, the f-weighted projection onto range(X).
MatrixXd projection_matrix(const FeatureMap& features, const VectorXd& f);

// Largest ratio ||Pi_{f_n} T_pi v1 - Pi_{f_n} T_pi v2||_{f_n} / ||v1 - v2||_{f_n}
// over random pairs; `parallel` switches between the OpenMP kernel and the
// serial reference.
double contraction_factor_estimate(const EmphasisInputs& in, const FeatureMap& features, long n,
                                   int n_pairs, std::uint64_t seed, bool parallel = true);

// One-stop closed-form summary for the CLI.
struct EmphasisReport {
  long n = 0;
  VectorXd m_n, m, f_n, f;
  double bound_l1 = 0, bound_inf = 0, gap_l1 = 0, gap_inf = 0;
  double lambda_min = 0, kappa = 0;
  double spectral_norm_term = 0, inf_norm_term = 0;
  MatrixXd a_n;
  VectorXd b_n;
  std::optional<VectorXd> w_star_n;  // empty when A_n is singular
  long min_n_nd_bound = 0, min_n_nd_actual = 0, min_n_contract_bound = 0;
  bool nd_scan_on_features = false;
  double n1 = 0, n2 = 0;
  double contraction_estimate = 0;
};

EmphasisReport analyze_emphasis(const EmphasisInputs& in, const FeatureMap& features,
                                const VectorXd& reward, long n, int contraction_pairs = 10000,
                                std::uint64_t seed = 0);

std::string report_to_json(const EmphasisReport& report);
EmphasisReport report_from_json(const std::string& text);

}  // namespace tetd
