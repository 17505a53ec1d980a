#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "laica/laica.hpp"

using namespace laica;

namespace {

std::vector<int> iota_ids(int n) {
  std::vector<int> ids(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<size_t>(i)] = i;
  return ids;
}

}  // namespace

TEST(DecisionPolicy, TinyStdSampleEqualsMean) {
  Rng rng(0);
  DecisionPolicyConfig cfg;
  cfg.log_std = std::log(1e-8);
  DecisionPolicy beta(16, cfg, rng);
  Vec f = rng.normal_vec(16);
  auto s = beta.sample(f, rng);
  EXPECT_LT((s.e_hat - beta.mean(f)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(DecisionPolicy, LogProbAtModeClosedForm) {
  Rng rng(1);
  DecisionPolicyConfig cfg;
  cfg.log_std = std::log(0.7);
  DecisionPolicy beta(5, cfg, rng);
  Vec f = rng.normal_vec(5);
  EXPECT_NEAR(beta.log_prob(f, beta.mean(f)), -std::log(2 * std::numbers::pi * 0.49), 1e-12);
}

TEST(DecisionPolicy, SampleMeanMatchesMonteCarlo) {
  Rng rng(2);
  DecisionPolicy beta(4, DecisionPolicyConfig{}, rng);
  Vec f = rng.normal_vec(4);
  Vec acc = Vec::Zero(2);
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += beta.sample(f, rng).e_hat;
  acc /= n;
  Vec mu = beta.mean(f);
  for (int d = 0; d < 2; ++d) EXPECT_LT(std::abs(acc[d] - mu[d]), 3.0 / std::sqrt(double(n)));
}

TEST(DecisionPolicy, DensityIntegratesToOne) {
  Rng rng(3);
  DecisionPolicyConfig cfg;
  cfg.log_std = std::log(0.5);
  DecisionPolicy beta(3, cfg, rng);
  Vec f = rng.normal_vec(3);
  Vec mu = beta.mean(f);
  // uniform Monte Carlo over the +-6 sigma box
  const double half = 6 * 0.5, vol = std::pow(2 * half, 2);
  const int n = 400000;
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    Vec e = mu + Vec((Vec(2) << rng.uniform(-half, half), rng.uniform(-half, half)).finished());
    acc += std::exp(beta.log_prob(f, e));
  }
  EXPECT_NEAR(acc / n * vol, 1.0, 0.02);
}

TEST(DecisionPolicy, ScoreMatchesFiniteDifferences) {
  Rng rng(4);
  for (bool learn : {false, true}) {
    for (std::vector<int> hidden : {std::vector<int>{}, std::vector<int>{8}}) {
      DecisionPolicyConfig cfg;
      cfg.hidden = hidden;
      cfg.learn_log_std = learn;
      cfg.log_std = -0.3;
      DecisionPolicy beta(6, cfg, rng);
      Vec f = rng.normal_vec(6);
      Vec e = rng.normal_vec(2);
      DecisionPolicy probe = beta;
      auto lp = [&](const Vec& p) {
        probe.set_params(p);
        return probe.log_prob(f, e);
      };
      Vec g = beta.score(f, e);
      Vec num = numeric_gradient(lp, beta.params(), 1e-5);
      if (!learn) num[num.size() - 1] = 0.0;  // fixed log-std gets no gradient
      EXPECT_LE(max_relative_error(g, num), 1e-4);
    }
  }
}

TEST(DecisionPolicy, ScoreAtModeIsZeroForMean) {
  Rng rng(5);
  DecisionPolicy beta(6, DecisionPolicyConfig{}, rng);
  Vec f = rng.normal_vec(6);
  Vec g = beta.score(f, beta.mean(f));
  EXPECT_EQ(g.head(beta.mean_map().size()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(DecisionPolicy, NonFiniteMeanFaults) {
  Rng rng(6);
  DecisionPolicy beta(3, DecisionPolicyConfig{}, rng);
  Vec p = beta.params();
  p[0] = std::numeric_limits<double>::infinity();
  beta.set_params(p);
  EXPECT_THROW(beta.sample(Vec::Ones(3), rng), Divergence);
}

TEST(ActionSelector, EqualRowsOrZeroLatentGiveUniform) {
  Rng rng(0);
  ActionSelector sel(2);
  sel.stack_rows(4, rng);
  auto ids = iota_ids(4);
  Vec p0 = sel.probabilities(Vec::Zero(2), ids);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(p0[i], 0.25, 1e-15);
  sel.weights().rowwise() = sel.weights().row(0);
  Vec p1 = sel.probabilities(rng.normal_vec(2), ids);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(p1[i], 0.25, 1e-15);
}

TEST(ActionSelector, SoftmaxExample) {
  Rng rng(0);
  ActionSelector sel(2);
  sel.stack_rows(3, rng);
  sel.weights() << 1, 0, 0, 1, -1, 0;
  Vec e(2);
  e << 10, 0;
  Vec p = sel.probabilities(e, iota_ids(3));
  EXPECT_NEAR(p[0], 1.0, 1e-4);
  EXPECT_NEAR(p[1], 0.0, 1e-4);
  EXPECT_NEAR(p[2], 0.0, 1e-4);
  // direct evaluation
  double z = std::exp(10.0) + 1.0 + std::exp(-10.0);
  EXPECT_NEAR(p[1], 1.0 / z, 1e-15);
  EXPECT_EQ(sel.select(e, iota_ids(3), rng, SelectMode::greedy).action_id, 0);
}

TEST(ActionSelector, UnavailableActionsGetZeroProbability) {
  Rng rng(1);
  ActionSelector sel(2);
  sel.stack_rows(6, rng);
  std::vector<int> ids{0, 2, 5};
  for (int i = 0; i < 200; ++i) {
    auto s = sel.select(rng.normal_vec(2), ids, rng);
    EXPECT_TRUE(s.action_id == 0 || s.action_id == 2 || s.action_id == 5);
    EXPECT_NEAR(s.probabilities.sum(), 1.0, 1e-12);
    EXPECT_EQ(s.probabilities.size(), 3);
  }
  EXPECT_THROW(sel.probabilities(Vec::Zero(2), std::vector<int>{}), NoAvailableActions);
  EXPECT_THROW(sel.probabilities(Vec::Zero(2), std::vector<int>{7}), DomainError);
}

TEST(ActionSelector, StackRowsKeepsOldRowsBitIdentical) {
  Rng rng(2);
  ActionSelector sel(3);
  sel.stack_rows(5, rng);
  Mat before = sel.weights();
  Vec e = rng.normal_vec(3);
  Vec s_before = sel.scores(e, iota_ids(5));
  Vec p_before = sel.probabilities(e, iota_ids(5));
  sel.stack_rows(3, rng);
  EXPECT_EQ(sel.rows(), 8);
  EXPECT_EQ(std::memcmp(before.data(), sel.weights().topRows(5).eval().data(), sizeof(double) * 15), 0);
  Vec s_after = sel.scores(e, iota_ids(5));
  EXPECT_EQ(s_before, s_after);
  Vec p_all = sel.probabilities(e, iota_ids(8));
  double factor = p_all[0] / p_before[0];
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(p_all[i], p_before[i] * factor, 1e-15);
  EXPECT_THROW(sel.stack_rows(0, rng), DomainError);
}

TEST(ActionSelector, LogProbGradientMatchesFiniteDifferences) {
  Rng rng(3);
  ActionSelector sel(3, 0.7);
  sel.stack_rows(5, rng);
  std::vector<int> ids{0, 1, 3, 4};
  Vec e = rng.normal_vec(3);
  Mat rg = Mat::Zero(5, 3);
  Vec eg = Vec::Zero(3);
  double lp = sel.log_prob_backward(3, e, ids, rg, eg);
  EXPECT_NEAR(lp, sel.log_prob(3, e, ids), 1e-14);
  EXPECT_NEAR(lp, std::log(sel.probabilities(e, ids)[2]), 1e-12);
  auto of_e = [&](const Vec& x) { return sel.log_prob(3, x, ids); };
  EXPECT_LE(check_gradient(of_e, eg, e, 1e-6), 1e-4);
  ActionSelector probe = sel;
  auto of_rows = [&](const Vec& w) {
    probe.weights() = Eigen::Map<const Mat>(w.data(), 5, 3);
    return probe.log_prob(3, e, ids);
  };
  Vec flat = Eigen::Map<const Vec>(sel.weights().data(), 15);
  Vec g = Eigen::Map<const Vec>(rg.data(), 15);
  EXPECT_LE(check_gradient(of_rows, g, flat, 1e-6), 1e-4);
  EXPECT_EQ(rg.row(2).cwiseAbs().maxCoeff(), 0.0);  // unavailable row untouched
}

TEST(InverseDynamics, ZeroNoiseSampleIsMean) {
  Rng rng(0);
  InverseDynamics inv(4, 2, InverseDynamicsConfig{}, rng);
  auto t = inv.encode_transition(rng.normal_vec(4), rng.normal_vec(4), Vec::Zero(2));
  EXPECT_EQ(t.e_sample, t.mean);
  EXPECT_TRUE((t.std.array() > 0).all());
}

TEST(InverseDynamics, LogStdClampFloor) {
  Rng rng(1);
  InverseDynamics inv(2, 1, InverseDynamicsConfig{{}}, rng);
  Vec p = Vec::Zero(inv.encoder().size());
  // layer is 4 inputs -> 2 outputs; bias of the log-std output set very low
  p[inv.encoder().size() - 1] = -20.0;
  inv.encoder().set_params(p);
  auto enc = inv.encode(Vec::Zero(2), Vec::Zero(2));
  EXPECT_DOUBLE_EQ(enc.std[0], std::exp(-5.0));
  p[inv.encoder().size() - 1] = 20.0;
  inv.encoder().set_params(p);
  EXPECT_DOUBLE_EQ(inv.encode(Vec::Zero(2), Vec::Zero(2)).std[0], std::exp(2.0));
}

TEST(InverseDynamics, SampleGradientMatchesFiniteDifferences) {
  Rng rng(2);
  for (std::vector<int> hidden : {std::vector<int>{}, std::vector<int>{64}}) {
    InverseDynamics inv(5, 3, InverseDynamicsConfig{hidden}, rng);
    inv.encoder().params() *= 0.5;  // keep raw log-std inside the clamp
    Vec f = rng.normal_vec(5), fn = rng.normal_vec(5), z = rng.normal_vec(3), u = rng.normal_vec(3);
    auto enc = inv.encode(f, fn);
    ASSERT_TRUE((enc.raw_log_std.array() > -5).all() && (enc.raw_log_std.array() < 2).all());
    Vec g = Vec::Zero(inv.encoder().size());
    inv.backward(enc, u, u.cwiseProduct(z), g);  // d(u . e_sample)
    InverseDynamics probe = inv;
    auto f_of = [&](const Vec& p) {
      probe.encoder().set_params(p);
      return u.dot(probe.encode_transition(f, fn, z).e_sample);
    };
    EXPECT_LE(check_gradient(f_of, g, inv.encoder().params(), 1e-5), 1e-4);
  }
}

TEST(Critic, TdErrorExamples) {
  Rng rng(0);
  Critic c(3, CriticConfig{}, rng);
  c.value_map().params().setZero();
  c.reset_trace();
  EXPECT_DOUBLE_EQ(c.update(Vec::Ones(3), 1.0, Vec::Ones(3), false, 0.9, 0.9, 0.0), 1.0);
  c.reset_trace();
  Vec before = c.value_map().params();
  EXPECT_DOUBLE_EQ(c.update(Vec::Ones(3), 0.0, Vec::Ones(3), true, 0.9, 0.9, 0.1), 0.0);
  EXPECT_EQ(c.value_map().params(), before);
}

TEST(Critic, TdTargetGradientMatchesFiniteDifferences) {
  // The critic step follows -1/2 d(delta^2)/dw with the target held fixed:
  // delta * grad v(s).
  Rng rng(1);
  Critic c(4, CriticConfig{{8}}, rng);
  Vec f = rng.normal_vec(4), fn = rng.normal_vec(4);
  const double r = 0.3, gamma = 0.9;
  double target = r + gamma * c.value(fn);
  Critic probe = c;
  auto half_sq = [&](const Vec& p) {
    probe.value_map().set_params(p);
    double d = target - probe.value(f);
    return -0.5 * d * d;
  };
  Vec p0 = c.value_map().params();
  const double v_s = c.value(f);
  c.reset_trace();
  double delta = c.update(f, r, fn, false, gamma, 0.0, 1.0);
  Vec step = c.value_map().params() - p0;  // lr 1, no trace decay: delta * grad v(s)
  EXPECT_NEAR(delta, target - v_s, 1e-12);
  EXPECT_LE(check_gradient(half_sq, step, p0, 1e-6), 1e-4);
}

TEST(Critic, ConvergesOnTwoStateChain) {
  // s0 -> s1 -> s0 deterministically, r(s0)=1, r(s1)=0, reward on arrival.
  // v = (I - gamma P)^-1 r_arrival with r_arrival = P r.
  const double gamma = 0.9;
  Mat P(2, 2);
  P << 0, 1, 1, 0;
  Vec r(2);
  r << 1, 0;
  Vec v = (Mat::Identity(2, 2) - gamma * P).lu().solve(P * r);
  Rng rng(2);
  Critic c(2, CriticConfig{}, rng);
  Vec e0 = Vec::Unit(2, 0), e1 = Vec::Unit(2, 1);
  for (int sweep = 0; sweep < 20000; ++sweep) {
    c.reset_trace();
    c.update(e0, r[1], e1, false, gamma, 0.0, 0.05);
    c.reset_trace();
    c.update(e1, r[0], e0, false, gamma, 0.0, 0.05);
  }
  // one-hot features with the bias: value is w_s + b
  EXPECT_NEAR(c.value(e0), v[0], 1e-3);
  EXPECT_NEAR(c.value(e1), v[1], 1e-3);
}

TEST(Critic, NonFiniteTdFaults) {
  Rng rng(3);
  Critic c(2, CriticConfig{}, rng);
  EXPECT_THROW(c.update(Vec::Ones(2), std::nan(""), Vec::Ones(2), false, 0.9, 0.9, 0.1), Divergence);
}

TEST(Bundle, CheckpointRoundTrip) {
  Rng rng(4);
  PolicyBundle b(Featurizer::fourier(3, 2), BundleConfig{}, rng);
  b.selector.stack_rows(7, rng);
  auto dir = std::filesystem::temp_directory_path() / "laica_bundle_test";
  save_bundle(b, dir, 3);
  Rng other(99);
  PolicyBundle c(Featurizer::fourier(3, 2), BundleConfig{}, other);
  c.selector.stack_rows(7, other);
  EXPECT_EQ(load_bundle(c, dir), 3);
  EXPECT_EQ(c.beta.params(), b.beta.params());
  EXPECT_EQ(c.selector.weights(), b.selector.weights());
  EXPECT_EQ(c.inverse.encoder().params(), b.inverse.encoder().params());
  EXPECT_EQ(c.critic.value_map().params(), b.critic.value_map().params());
  std::filesystem::remove_all(dir);
}
