#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "tetd/analysis.hpp"
#include "tetd/envs/baird.hpp"

using namespace tetd;
using tetd::testing::mc_emphasis;
using tetd::testing::random_full_rank_features;
using tetd::testing::random_mdp;
using tetd::testing::random_policy;

namespace {
struct Instance {
  TabularMdp mdp;
  TabularPolicy mu, pi;
  InterestFunction interest;
  EmphasisInputs inputs;
};

Instance make_instance(std::uint64_t seed, int states, int actions, double gamma,
                       bool unit_interest = true) {
  Rng rng(seed);
  Instance inst{random_mdp(rng, states, actions, gamma), random_policy(rng, states, actions),
                random_policy(rng, states, actions), InterestFunction::ones(states), {}};
  if (!unit_interest)
    for (int s = 0; s < states; ++s) inst.interest.values(s) = rng.uniform(0.2, 2.0);
  inst.inputs = prediction_inputs(inst.mdp, inst.mu, inst.pi, inst.interest);
  return inst;
}
}  // namespace

TEST_CASE("truncated emphasis at n = 0 is the interest") {
  const Instance inst = make_instance(1, 5, 2, 0.9, false);
  const VectorXd m0 = truncated_emphasis(inst.inputs, 0);
  CHECK((m0 - inst.interest.values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("zero discount collapses every emphasis to the interest") {
  const Instance inst = make_instance(2, 4, 3, 0.0, false);
  for (long n : {0L, 3L, 17L})
    CHECK((truncated_emphasis(inst.inputs, n) - inst.interest.values).cwiseAbs().maxCoeff() <
          1e-14);
  CHECK((emphasis_limit(inst.inputs) - inst.interest.values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("emphasis limit agrees with a deep truncation") {
  Rng rng(3);
  const TabularMdp mdp = random_mdp(rng, 6, 2, 0.9);
  const TabularPolicy pi = random_policy(rng, 6, 2);
  const EmphasisInputs on_policy = prediction_inputs(mdp, pi, pi, InterestFunction::ones(6));
  const VectorXd m = emphasis_limit(on_policy);
  const VectorXd m500 = truncated_emphasis(on_policy, 500);
  CHECK((m - m500).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("Monte-Carlo conditional expectations match the truncated emphasis") {
  const Instance inst = make_instance(4, 3, 2, 0.7);
  for (long n : {0L, 2L, 5L}) {
    const VectorXd m_n = truncated_emphasis(inst.inputs, n);
    const auto mc = mc_emphasis(inst.mdp, inst.mu, inst.pi, inst.interest.values, n,
                                /*control=*/false, 1000000, 999 + n);
    for (const auto& [state, stat] : mc)
      CHECK(std::abs(stat.mean - m_n(state)) < 3.0 * stat.se + 1e-10);
  }
}

TEST_CASE("tail bounds hold with the exact constants across random models") {
  int violations = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const double gamma = rep % 3 == 0 ? 0.5 : (rep % 3 == 1 ? 0.9 : 0.99);
    const Instance inst = make_instance(100 + rep, 2 + rep % 9, 1 + rep % 3, gamma, rep % 2 == 0);
    for (long n = 0; n <= 64; ++n) {
      const EmphasisTailBounds b = emphasis_tail_bounds(inst.inputs, n);
      if (b.gap_l1 > b.bound_l1 * (1.0 + 1e-12) + 1e-12) ++violations;
      if (b.gap_inf > b.bound_inf * (1.0 + 1e-12) + 1e-12) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("expected update with tabular features reduces to the core matrices") {
  const Instance inst = make_instance(7, 5, 2, 0.9);
  const FeatureMap tabular(MatrixXd::Identity(5, 5));
  const VectorXd r_pi = policy_reward(inst.mdp, inst.pi);
  const auto [a, b] = expected_update_limit(inst.inputs, tabular, r_pi);
  const VectorXd f = emphasis_weighting_limit(inst.inputs);
  const MatrixXd expected_a =
      f.asDiagonal() * (inst.mdp.discount * inst.inputs.p_pi - MatrixXd::Identity(5, 5));
  CHECK((a - expected_a).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((b - f.asDiagonal() * r_pi).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("on-policy n = 0 with unit interest yields the classical TD matrix") {
  Rng rng(8);
  const TabularMdp mdp = random_mdp(rng, 5, 2, 0.9);
  const TabularPolicy pi = random_policy(rng, 5, 2);
  const FeatureMap x = random_full_rank_features(rng, 5, 3);
  const EmphasisInputs inputs = prediction_inputs(mdp, pi, pi, InterestFunction::ones(5));
  const auto [a0, b0] = expected_update(inputs, x, policy_reward(mdp, pi), 0);
  const MatrixXd p_pi = state_transition_matrix(mdp, pi);
  const VectorXd d = stationary_distribution(p_pi).dist;
  const MatrixXd classical = x.matrix().transpose() * d.asDiagonal() *
                             (mdp.discount * p_pi - MatrixXd::Identity(5, 5)) * x.matrix();
  CHECK((a0 - classical).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fixed point") {
  SUBCASE("tabular limit solves the Bellman equation") {
    const Instance inst = make_instance(9, 5, 3, 0.85);
    const FeatureMap tabular(MatrixXd::Identity(5, 5));
    const VectorXd r_pi = policy_reward(inst.mdp, inst.pi);
    const auto [a, b] = expected_update_limit(inst.inputs, tabular, r_pi);
    const VectorXd w = fixed_point(a, b);
    const VectorXd v_pi = closed_form_values(inst.mdp, inst.pi);
    CHECK((w - v_pi).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("zero rewards give the zero fixed point") {
    Instance inst = make_instance(10, 4, 2, 0.9);
    inst.mdp.reward.setZero();
    const FeatureMap tabular(MatrixXd::Identity(4, 4));
    const auto [a, b] = expected_update(inst.inputs, tabular, policy_reward(inst.mdp, inst.pi), 6);
    CHECK(fixed_point(a, b).norm() < 1e-12);
  }
  SUBCASE("zero-reward tabular features on the counterexample") {
    const BairdEnv env = baird_env();
    const EmphasisInputs inputs =
        prediction_inputs(env.mdp, env.behavior, baird_target(0.1), InterestFunction::ones(7));
    const FeatureMap tabular(MatrixXd::Identity(7, 7));
    const NdThreshold nd = min_n_negative_definite(inputs, &tabular);
    const auto [a, b] =
        expected_update(inputs, tabular, policy_reward(env.mdp, baird_target(0.1)), nd.n_actual);
    CHECK(fixed_point(a, b).norm() < 1e-12);
  }
  SUBCASE("random instances satisfy the residual check") {
    for (int rep = 0; rep < 10; ++rep) {
      const Instance inst = make_instance(200 + rep, 6, 2, 0.9);
      Rng rng(300 + rep);
      const FeatureMap x = random_full_rank_features(rng, 6, 4);
      const NdThreshold nd = min_n_negative_definite(inst.inputs, &x);
      const auto [a, b] =
          expected_update(inst.inputs, x, policy_reward(inst.mdp, inst.pi), nd.n_bound);
      const VectorXd w = fixed_point(a, b);
      CHECK((a * w + b).norm() < 1e-9 * (1.0 + b.norm()));
    }
  }
  SUBCASE("singular systems raise") {
    CHECK_THROWS_AS(fixed_point(MatrixXd::Zero(2, 2), VectorXd::Ones(2)), std::runtime_error);
  }
}

TEST_CASE("negative definiteness test") {
  CHECK(is_negative_definite(-MatrixXd::Identity(3, 3)));
  MatrixXd rotation(2, 2);
  rotation << 0, 1, -1, 0;  // symmetric part vanishes
  CHECK_FALSE(is_negative_definite(rotation));
  MatrixXd indefinite(2, 2);
  indefinite << 1, 0, 0, -1;
  CHECK_FALSE(is_negative_definite(indefinite));
  for (int rep = 0; rep < 100; ++rep) {
    Rng rng(400 + rep);
    const TabularMdp mdp = random_mdp(rng, 2 + rep % 7, 1 + rep % 3, 0.9);
    const TabularPolicy pi = random_policy(rng, mdp.n_states, mdp.n_actions);
    const MatrixXd p_pi = state_transition_matrix(mdp, pi);
    const VectorXd d = stationary_distribution(p_pi).dist;
    const MatrixXd on_policy_td =
        d.asDiagonal() * (mdp.discount * p_pi - MatrixXd::Identity(mdp.n_states, mdp.n_states));
    CHECK(is_negative_definite(on_policy_td));
  }
}

TEST_CASE("norms") {
  MatrixXd m(2, 2);
  m << 3, 0, 0, -4;
  CHECK(spectral_norm(m) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(inf_norm(m) == doctest::Approx(4.0));
  MatrixXd r(2, 2);
  r << 1, -2, 0.5, 0.25;
  CHECK(inf_norm(r) == doctest::Approx(3.0));
}

TEST_CASE("negative-definiteness threshold") {
  SUBCASE("on-policy instances need no truncation at all") {
    for (int rep = 0; rep < 5; ++rep) {
      Rng rng(500 + rep);
      const TabularMdp mdp = random_mdp(rng, 5, 2, 0.9);
      const TabularPolicy pi = random_policy(rng, 5, 2);
      const EmphasisInputs inputs = prediction_inputs(mdp, pi, pi, InterestFunction::ones(5));
      const NdThreshold nd = min_n_negative_definite(inputs, nullptr);
      CHECK(nd.n_actual == 0);
      CHECK(nd.lambda_min > 0.0);
    }
  }
  SUBCASE("the core matrix is negative definite at the bound on random instances") {
    for (int rep = 0; rep < 25; ++rep) {
      const Instance inst = make_instance(600 + rep, 2 + rep % 6, 1 + rep % 3, 0.9);
      const NdThreshold nd = min_n_negative_definite(inst.inputs, nullptr);
      const VectorXd f_n = emphasis_weighting(inst.inputs, nd.n_bound);
      const int s = inst.inputs.size();
      const MatrixXd core =
          f_n.asDiagonal() * (0.9 * inst.inputs.p_pi - MatrixXd::Identity(s, s));
      CHECK(is_negative_definite(core));
      CHECK(nd.n_actual <= nd.n_bound);
    }
  }
  SUBCASE("the Baird bounds sit in the expected window") {
    const BairdEnv env = baird_env();
    for (double p : {0.0, 0.02, 0.04, 0.06, 0.08, 0.1}) {
      const EmphasisInputs inputs =
          prediction_inputs(env.mdp, env.behavior, baird_target(p), InterestFunction::ones(7));
      const NdThreshold nd = min_n_negative_definite(inputs, nullptr);
      CHECK(nd.n_bound >= 350);
      CHECK(nd.n_bound <= 1400);
      CHECK(nd.n_actual < nd.n_bound);
    }
  }
}

TEST_CASE("contraction threshold and empirical factor") {
  SUBCASE("zero discount needs no truncation") {
    const Instance inst = make_instance(11, 4, 2, 0.0);
    CHECK(min_n_contraction(inst.inputs).n_bound == 0);
  }
  SUBCASE("at the bound the projected operator contracts at rate sqrt(gamma)") {
    for (int rep = 0; rep < 10; ++rep) {
      const Instance inst = make_instance(700 + rep, 5, 2, 0.9);
      Rng rng(800 + rep);
      const FeatureMap x = random_full_rank_features(rng, 5, 3);
      const ContractionThreshold ct = min_n_contraction(inst.inputs);
      const double factor =
          contraction_factor_estimate(inst.inputs, x, ct.n_bound, 10000, 900 + rep);
      CHECK(factor <= std::sqrt(0.9) + 1e-9);
      CHECK(ct.kappa > 0.0);
      CHECK(ct.kappa <= 1.0);
    }
  }
  SUBCASE("parallel and serial estimators agree") {
    const Instance inst = make_instance(12, 6, 2, 0.9);
    Rng rng(13);
    const FeatureMap x = random_full_rank_features(rng, 6, 4);
    const double par = contraction_factor_estimate(inst.inputs, x, 8, 5000, 42, true);
    const double ser = contraction_factor_estimate(inst.inputs, x, 8, 5000, 42, false);
    CHECK(par == doctest::Approx(ser).epsilon(1e-10));
  }
}

TEST_CASE("selection helpers agree with the integer thresholds") {
  for (int rep = 0; rep < 20; ++rep) {
    const Instance inst = make_instance(1000 + rep, 4, 2, 0.9);
    const auto [n1, n2] = selection_helpers_n1_n2(inst.inputs);
    const NdThreshold nd = min_n_negative_definite(inst.inputs, nullptr);
    const ContractionThreshold ct = min_n_contraction(inst.inputs);
    // The bound is the smallest integer strictly above the log-ratio form.
    CHECK(nd.n_bound == std::max<long>(0, static_cast<long>(std::floor(n1)) + 1));
    CHECK(ct.n_bound == std::max<long>(0, static_cast<long>(std::floor(n2)) + 1));
  }
}

TEST_CASE("n1 grows with the discount on a fixed model") {
  Rng rng(14);
  const TabularMdp base = random_mdp(rng, 4, 2, 0.5);
  const TabularPolicy mu = random_policy(rng, 4, 2);
  const TabularPolicy pi = random_policy(rng, 4, 2);
  double last = -10.0;
  for (double gamma : {0.5, 0.9, 0.99}) {
    TabularMdp mdp = base;
    mdp.discount = gamma;
    const auto [n1, n2] =
        selection_helpers_n1_n2(prediction_inputs(mdp, mu, pi, InterestFunction::ones(4)));
    CHECK(n1 > last);
    last = n1;
  }
}

TEST_CASE("Baird helper values are finite and positive") {
  const BairdEnv env = baird_env();
  for (double p : {0.0, 0.05, 0.1}) {
    const EmphasisInputs inputs =
        prediction_inputs(env.mdp, env.behavior, baird_target(p), InterestFunction::ones(7));
    const auto [n1, n2] = selection_helpers_n1_n2(inputs);
    CHECK(std::isfinite(n1));
    CHECK(std::isfinite(n2));
    CHECK(std::max(n1, n2) > 0.0);
  }
}

TEST_CASE("projection matrix") {
  SUBCASE("identity features project to the identity") {
    const VectorXd f = VectorXd::Constant(4, 0.3);
    const MatrixXd pi = projection_matrix(FeatureMap(MatrixXd::Identity(4, 4)), f);
    CHECK((pi - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("idempotence and range invariance") {
    Rng rng(15);
    const FeatureMap x = random_full_rank_features(rng, 6, 3);
    VectorXd f(6);
    for (int i = 0; i < 6; ++i) f(i) = rng.uniform(0.1, 2.0);
    const MatrixXd pi = projection_matrix(x, f);
    CHECK((pi * pi - pi).cwiseAbs().maxCoeff() < 1e-9);
    VectorXd w(3);
    w << 1.0, -2.0, 0.5;
    CHECK((pi * (x.matrix() * w) - x.matrix() * w).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("the truncated fixed point solves the projected Bellman equation") {
    for (int rep = 0; rep < 10; ++rep) {
      const Instance inst = make_instance(1100 + rep, 5, 2, 0.9);
      Rng rng(1200 + rep);
      const FeatureMap x = random_full_rank_features(rng, 5, 3);
      const NdThreshold nd = min_n_negative_definite(inst.inputs, &x);
      const long n = nd.n_actual;
      const VectorXd r_pi = policy_reward(inst.mdp, inst.pi);
      const auto [a, b] = expected_update(inst.inputs, x, r_pi, n);
      const VectorXd w = fixed_point(a, b);
      const VectorXd f_n = emphasis_weighting(inst.inputs, n);
      const MatrixXd proj = projection_matrix(x, f_n);
      const VectorXd xw = x.matrix() * w;
      const VectorXd bellman = r_pi + inst.mdp.discount * inst.inputs.p_pi * xw;
      CHECK((proj * bellman - xw).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("control overload: pair-indexed emphasis matches Monte Carlo") {
  Rng rng(16);
  const TabularMdp mdp = random_mdp(rng, 3, 2, 0.7);
  const TabularPolicy mu = random_policy(rng, 3, 2);
  const TabularPolicy pi = random_policy(rng, 3, 2);
  const InterestFunction interest = InterestFunction::ones(6);
  const EmphasisInputs inputs = control_inputs(mdp, mu, pi, interest);
  for (long n : {0L, 2L, 4L}) {
    const VectorXd m_n = truncated_emphasis(inputs, n);
    const auto mc = mc_emphasis(mdp, mu, pi, interest.values, n, /*control=*/true, 1000000,
                                1300 + n);
    for (const auto& [pair, stat] : mc)
      CHECK(std::abs(stat.mean - m_n(pair)) < 3.0 * stat.se + 1e-10);
  }
}

TEST_CASE("monotone weighting: f sandwiches every truncation") {
  for (int rep = 0; rep < 10; ++rep) {
    const Instance inst = make_instance(1400 + rep, 5, 2, 0.9, rep % 2 == 0);
    const VectorXd f = emphasis_weighting_limit(inst.inputs);
    const VectorXd f0 = emphasis_weighting(inst.inputs, 0);
    VectorXd prev = f0;
    CHECK((f0 - inst.inputs.d_mu.cwiseProduct(inst.inputs.interest)).cwiseAbs().maxCoeff() <
          1e-14);
    for (long n = 1; n <= 8; ++n) {
      const VectorXd f_n = emphasis_weighting(inst.inputs, n);
      for (int s = 0; s < f_n.size(); ++s) {
        CHECK(f_n(s) > prev(s));
        CHECK(f(s) > f_n(s));
      }
      prev = f_n;
    }
  }
}

TEST_CASE("deep truncation reaches the limit at the geometric horizon") {
  // Tolerance scaled by the emphasis magnitude: the gap at the horizon where
  // gamma^{n+1} ~ 1e-9 is proportional to ||m||.
  for (int rep = 0; rep < 5; ++rep) {
    const Instance inst = make_instance(1500 + rep, 6, 2, 0.9);
    const long horizon = static_cast<long>(std::ceil(std::log(1e-9) / std::log(0.9)));
    const VectorXd m_n = truncated_emphasis(inst.inputs, horizon);
    const VectorXd m = emphasis_limit(inst.inputs);
    CHECK((m_n - m).lpNorm<Eigen::Infinity>() <
          1e-8 * std::max(1.0, m.lpNorm<Eigen::Infinity>()));
  }
  const BairdEnv env = baird_env();
  const EmphasisInputs inputs =
      prediction_inputs(env.mdp, env.behavior, baird_target(0.0), InterestFunction::ones(7));
  const long horizon = static_cast<long>(std::ceil(std::log(1e-9) / std::log(0.99)));
  const VectorXd gap = truncated_emphasis(inputs, horizon) - emphasis_limit(inputs);
  CHECK(gap.lpNorm<Eigen::Infinity>() <
        1e-8 * std::max(1.0, emphasis_limit(inputs).lpNorm<Eigen::Infinity>()));
}

TEST_CASE("report serialization round trips") {
  const Instance inst = make_instance(17, 4, 2, 0.9);
  Rng rng(18);
  const FeatureMap x = random_full_rank_features(rng, 4, 3);
  const EmphasisReport report =
      analyze_emphasis(inst.inputs, x, policy_reward(inst.mdp, inst.pi), 4, 2000, 7);
  const EmphasisReport back = report_from_json(report_to_json(report));
  CHECK(back.n == report.n);
  CHECK((back.m_n - report.m_n).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((back.a_n - report.a_n).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(back.lambda_min == doctest::Approx(report.lambda_min).epsilon(1e-12));
  CHECK(back.min_n_nd_bound == report.min_n_nd_bound);
  REQUIRE(back.w_star_n.has_value() == report.w_star_n.has_value());
  if (report.w_star_n)
    CHECK((*back.w_star_n - *report.w_star_n).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(back.contraction_estimate == doctest::Approx(report.contraction_estimate).epsilon(1e-12));
}
