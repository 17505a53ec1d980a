#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include <Eigen/Dense>

#include "laica/laica.hpp"

using namespace laica;

namespace {

// v = (I - gamma P_pi)^{-1} r under the solver's own policy.
Vec linear_solve(const TabularLatentMdp& env, const std::vector<Vec>& cands, const std::vector<int>& policy) {
  const int n = env.n_states();
  Mat p(n, n);
  for (int s = 0; s < n; ++s) p.row(s) = env.kernel_row(s, cands[static_cast<size_t>(policy[static_cast<size_t>(s)])]).transpose();
  Mat a = Mat::Identity(n, n) - env.gamma() * p;
  return a.fullPivLu().solve(env.reward());
}

TabularLatentMdp with_reward(const TabularLatentMdp& env, Vec r, double gamma) {
  return TabularLatentMdp(env.anchors(), env.weight_map(), std::move(r), gamma, env.initial_distribution());
}

}  // namespace

TEST(ValueIteration, GeometricSeries) {
  // both states jump to state 0 and pay 1
  Mat p = Mat::Zero(2, 2);
  p.col(0).setOnes();
  auto env = TabularLatentMdp({p, p}, multilinear_weights(1), Vec::Ones(2), 0.5, Vec::Unit(2, 0));
  std::vector<Vec> c{Vec::Constant(1, 0.3)};
  auto sol = value_iteration(env, c);
  EXPECT_NEAR(sol.values[0], 2.0, 1e-9);
  EXPECT_NEAR(sol.values[1], 2.0, 1e-9);
  EXPECT_LE(sol.residual, 1e-10);
}

TEST(ValueIteration, GammaZeroIsReward) {
  auto base = generate_tabular(3, 6, 4, 2, {WeightMapKind::multilinear, 0.9, 50});
  auto env = with_reward(base, base.reward(), 0.0);
  auto grid = grid_points(env.latent_space(), 5);
  auto sol = value_iteration(env, grid);
  EXPECT_LT((sol.values - env.reward()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ValueIteration, MatchesLinearSolve) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto env = generate_tabular(seed, 5, 4, 2, {WeightMapKind::multilinear, 0.9, 50});
    auto cands = grid_points(env.latent_space(), 7);
    auto sol = value_iteration(env, cands);
    Vec exact = linear_solve(env, cands, sol.policy);
    EXPECT_LT((sol.values - exact).cwiseAbs().maxCoeff(), 1e-8) << "seed " << seed;
  }
}

TEST(ValueIteration, MonotoneInReward) {
  auto env = generate_tabular(5, 6, 2, 1);
  auto cands = grid_points(env.latent_space(), 9);
  Vec base = value_iteration(env, cands).values;
  for (int s = 0; s < env.n_states(); ++s) {
    Vec r = env.reward();
    r[s] += 0.3;
    Vec bumped = value_iteration(with_reward(env, r, env.gamma()), cands).values;
    EXPECT_TRUE(((bumped - base).array() >= -1e-9).all()) << "state " << s;
  }
}

TEST(ValueIteration, RefinementNeverHurts) {
  auto env = generate_tabular(6, 8, 4, 2, {WeightMapKind::multilinear, 0.9, 50});
  double prev = -1e300;
  for (int per : {2, 3, 5, 9, 17}) {  // nested grids
    double v = env.initial_distribution().dot(value_iteration(env, grid_points(env.latent_space(), per)).values);
    EXPECT_GE(v, prev - 1e-9) << per;
    prev = v;
  }
}

TEST(Bounds, DirectArithmetic) {
  EXPECT_NEAR(suboptimality_bound(0.9, 2.0, 0.25, 1.0), 45.0, 1e-9);
  EXPECT_EQ(suboptimality_bound(0.9, 2.0, 0.0, 1.0), 0.0);
}

TEST(Bounds, FullDiscretizationClosesTheGap) {
  auto env = generate_tabular(8, 6, 4, 2, {WeightMapKind::multilinear, 0.9, 50});
  CertifyOptions opt;
  opt.grid_per_dim = 9;
  ChangeSchedule sched;
  sched.change_episodes = {0, 1};
  sched.additions = {cube_corners(2), grid_points(env.latent_space(), 9)};
  auto rep = certify_theorem1(env, sched, opt);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[1].epsilon, 0.0);
  EXPECT_LE(std::abs(rep.rows[1].gap), 2 * opt.tolerance / (1 - env.gamma()));
  for (const auto& r : rep.rows) EXPECT_TRUE(r.holds);
}

TEST(Bounds, CertificationHoldsOnSeededInstances) {
  int rows = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto inst = make_verification_instance(seed, 10, 2, 5, 1, 2);
    auto rep = certify_theorem1(inst.env, inst.schedule, CertifyOptions{32});
    for (const auto& r : rep.rows) {
      EXPECT_TRUE(r.holds) << "seed " << seed << " k " << r.k << " gap " << r.gap << " bound " << r.bound;
      EXPECT_GE(r.gap, -1e-8);
      ++rows;
    }
  }
  EXPECT_EQ(rows, 40);
}

TEST(Bounds, EpsilonNeverIncreases) {
  auto inst = make_verification_instance(4, 10, 1, 10, 1, 4);
  auto t = certify_corollary1(inst.env, inst.schedule, CertifyOptions{64});
  EXPECT_TRUE(t.epsilon_nonincreasing);
  for (size_t i = 1; i < t.epsilon.size(); ++i) EXPECT_LE(t.epsilon[i], t.epsilon[i - 1]);
}

TEST(Bounds, SingleActionForeverIsFlat) {
  auto env = generate_tabular(2, 6, 2, 1, {WeightMapKind::multilinear, 0.9, 50});
  Vec e = Vec::Constant(1, 0.4);
  ChangeSchedule sched;
  sched.change_episodes = {0, 1, 2};
  sched.additions = {{e}, {e}, {e}};
  auto t = certify_corollary1(env, sched, CertifyOptions{64});
  ASSERT_EQ(t.epsilon.size(), 3u);
  EXPECT_EQ(t.epsilon[0], t.epsilon[2]);
  EXPECT_EQ(t.gap[0], t.gap[2]);
}

TEST(Bounds, CsvHasOneRowPerChange) {
  auto inst = make_verification_instance(1, 5, 1, 3, 1, 2);
  auto rep = certify_theorem1(inst.env, inst.schedule, CertifyOptions{16});
  std::ostringstream os;
  write_bound_csv(os, rep.rows);
  auto text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_EQ(text.rfind("instance,k,n_available,epsilon_k,gap,bound,slack,holds\n", 0), 0u);
  EXPECT_EQ(bound_summary(rep.rows)["all_hold"], true);
}
