#include <gtest/gtest.h>

#include <cstring>

#include "laica/laica.hpp"

using namespace laica;

namespace {

// One state, horizon 1; the arm whose latent exceeds 0.5 pays 1.
class Bandit final : public Environment {
 public:
  Bandit() {
    info_.n_states = 1;
    info_.observation_dim = 1;
    info_.gamma = 0.99;
    info_.r_max = 1.0;
    info_.horizon = 1;
  }
  const BaseMdpInfo& info() const override { return info_; }
  int latent_dim() const override { return 1; }
  EnvState reset(Rng&) const override {
    EnvState s;
    s.obs = Vec::Constant(1, 0.5);
    s.index = 0;
    return s;
  }
  StepResult step(const EnvState& state, const Vec& latent, Rng&) const override {
    StepResult r;
    r.next = state;
    r.next.t = state.t + 1;
    r.next.terminal = r.terminal = true;
    r.reward = latent[0] > 0.5 ? 1.0 : 0.0;
    return r;
  }

 private:
  BaseMdpInfo info_;
};

ActionRegistry bandit_registry() {
  ActionRegistry reg(LatentActionSpace::unit_box(1));
  reg.add_change({Vec::Constant(1, 0.0), Vec::Constant(1, 1.0)});
  return reg;
}

std::vector<double> flat(const DirectPolicy& p) {
  std::vector<double> v;
  if (p.has_trunk()) v.assign(p.trunk().params().data(), p.trunk().params().data() + p.trunk().size());
  v.insert(v.end(), p.logit_weights().data(), p.logit_weights().data() + p.logit_weights().size());
  v.insert(v.end(), p.logit_bias().data(), p.logit_bias().data() + p.logit_bias().size());
  return v;
}

LifelongSetup small_maze(const MazeEnv& env, std::uint64_t seed, std::int64_t per_segment) {
  Rng rng = make_rng(seed, {static_cast<std::uint64_t>(Stream::schedule)});
  LifelongSetup s;
  s.env = &env;
  s.space = maze_latent_space(0.05);
  s.schedule = split_schedule(maze_action_latents(0.05), 5, per_segment, rng);
  s.episodes_per_segment = per_segment;
  return s;
}

AgentConfig quick_agent() {
  AgentConfig a;
  a.adaptation.trajectories = 3;
  a.adaptation.iterations = 5;
  a.adaptation.batch_size = 8;
  a.bundle.inverse.hidden = {8};
  a.direct.hidden = {8};
  return a;
}

}  // namespace

TEST(ImproveLaica, ZeroLearningRatesFreezeEverything) {
  Bandit env;
  auto reg = bandit_registry();
  Rng rng(1);
  BundleConfig bc;
  bc.beta.latent_dim = 2;
  PolicyBundle b(Featurizer::identity(1), bc, rng);
  b.selector.stack_rows(2, rng);
  Vec beta = b.beta.params();
  Vec critic = b.critic.value_map().params();
  ImprovementConfig cfg{0.99, 0.9, 0.0, 0.0};
  for (int i = 0; i < 20; ++i) improve_episode_laica(b, env, reg, cfg, rng);
  EXPECT_EQ(std::memcmp(beta.data(), b.beta.params().data(), sizeof(double) * beta.size()), 0);
  EXPECT_TRUE(critic == b.critic.value_map().params());
}

TEST(ImproveDirect, ZeroLearningRatesFreezeEverything) {
  Bandit env;
  auto reg = bandit_registry();
  Rng rng(2);
  auto f = Featurizer::identity(1);
  DirectPolicy p(1, DirectPolicyConfig{}, rng);
  p.stack_rows(2, rng);
  Critic c(1, CriticConfig{}, rng);
  auto before = flat(p);
  ImprovementConfig cfg{0.99, 0.9, 0.0, 0.0};
  for (int i = 0; i < 20; ++i) improve_episode_direct(p, c, f, env, reg, cfg, rng);
  EXPECT_EQ(before, flat(p));
}

TEST(ImproveLaica, LatentBanditFindsRewardingArm) {
  Bandit env;
  auto reg = bandit_registry();
  auto ids = reg.available_ids();
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    BundleConfig bc;
    bc.beta.latent_dim = 2;
    PolicyBundle b(Featurizer::identity(1), bc, rng);
    b.selector.stack_rows(2, rng);
    // frozen selector with distinguishable rows
    b.selector.weights() << 1, 0, -1, 0;
    ImprovementConfig cfg{0.99, 0.9, 1e-2, 5e-2};
    for (int ep = 0; ep < 2000; ++ep) improve_episode_laica(b, env, reg, cfg, rng);
    Vec f = b.featurizer(env.reset(rng).obs);
    wins += b.selector.select(b.beta.mean(f), ids, rng, SelectMode::greedy).action_id == 1;
  }
  EXPECT_GE(wins, 9);
}

TEST(ImproveDirect, BanditFindsRewardingArm) {
  Bandit env;
  auto reg = bandit_registry();
  auto ids = reg.available_ids();
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    auto f = Featurizer::identity(1);
    DirectPolicy p(1, DirectPolicyConfig{}, rng);
    p.stack_rows(2, rng);
    Critic c(1, CriticConfig{}, rng);
    ImprovementConfig cfg{0.99, 0.9, 1e-2, 5e-2};
    for (int ep = 0; ep < 2000; ++ep) improve_episode_direct(p, c, f, env, reg, cfg, rng);
    Vec probs = p.probabilities(f(Vec::Constant(1, 0.5)), ids);
    wins += probs[1] > probs[0];
  }
  EXPECT_GE(wins, 9);
}

TEST(DirectPolicy, MaskedActionsGetNoMassAndNoGradient) {
  Rng rng(3);
  DirectPolicy p(4, DirectPolicyConfig{{6}}, rng);
  p.stack_rows(5, rng);
  std::vector<int> ids{0, 2, 4};
  Vec f = rng.normal_vec(4);
  DirectPolicy::Gradient g;
  Vec probs = p.log_prob_gradient(f, ids, 2, g);
  EXPECT_EQ(probs.size(), 3);
  EXPECT_NEAR(probs.sum(), 1.0, 1e-12);
  for (int r : {1, 3}) {
    EXPECT_TRUE(g.logit_w.row(r).isZero(0.0));
    EXPECT_EQ(g.logit_b[r], 0.0);
  }
  EXPECT_THROW(p.probabilities(f, std::vector<int>{}), NoAvailableActions);
}

TEST(DirectPolicy, LogProbGradientMatchesFiniteDifferences) {
  Rng rng(4);
  DirectPolicy p(3, DirectPolicyConfig{{5}}, rng);
  p.stack_rows(4, rng);
  std::vector<int> ids{0, 1, 3};
  Vec f = rng.normal_vec(3);
  DirectPolicy::Gradient g;
  p.log_prob_gradient(f, ids, 3, g);
  auto x0 = flat(p);
  Vec x = Eigen::Map<Vec>(x0.data(), static_cast<Eigen::Index>(x0.size()));
  Vec analytic(x.size());
  analytic << g.trunk, Eigen::Map<const Vec>(g.logit_w.data(), g.logit_w.size()), g.logit_b;
  auto fn = [&](const Vec& v) {
    DirectPolicy q = p;
    DirectPolicy::Gradient step{v.head(p.trunk().size()) - x.head(p.trunk().size()),
                                Eigen::Map<const Mat>(v.data() + p.trunk().size(), p.rows(), p.head_dim()) -
                                    p.logit_weights(),
                                v.tail(p.rows()) - p.logit_bias()};
    q.add_scaled(step, 1.0);
    return std::log(q.probabilities(f, ids)[2]);
  };
  EXPECT_LE(check_gradient(fn, analytic, x, 1e-6), 1e-4);
}

TEST(Lifelong, StructuralInvariantsOnMaze) {
  MazeEnv env{MazeConfig{}};
  auto setup = small_maze(env, 7, 3);
  auto agent = quick_agent();

  // LAICA: beta size fixed; phases do not touch each other's parameters.
  Eigen::Index beta_count = -1;
  Vec beta_before_adapt;
  Mat sel_segment;
  Vec enc_segment;
  bool ok_beta = true, ok_phase = true, ok_rows = true;
  Mat rows_before;
  auto ev = [&](const LifelongEvent& e) {
    const auto& b = *e.bundle;
    if (beta_count < 0) beta_count = b.beta.parameter_count();
    ok_beta &= b.beta.parameter_count() == beta_count;
    switch (e.phase) {
      case LifelongPhase::before_change:
        beta_before_adapt = b.beta.params();
        rows_before = b.selector.weights();
        break;
      case LifelongPhase::after_change:
        // old rows bit-identical across stacking
        if (rows_before.rows() > 0)
          ok_rows &= std::memcmp(rows_before.data(), b.selector.weights().topRows(rows_before.rows()).eval().data(),
                                 sizeof(double) * rows_before.size()) == 0;
        break;
      case LifelongPhase::after_adaptation:
        ok_phase &= b.beta.params() == beta_before_adapt;
        sel_segment = b.selector.weights();
        enc_segment = b.inverse.encoder().params();
        break;
      case LifelongPhase::after_episode:
        ok_phase &= b.selector.weights() == sel_segment && b.inverse.encoder().params() == enc_segment;
        break;
    }
  };
  auto rec = run_lifelong(setup, Algorithm::laica_ac, agent, 11, ev);
  ASSERT_FALSE(rec.fault) << *rec.fault;
  EXPECT_TRUE(ok_beta);
  EXPECT_TRUE(ok_phase);
  EXPECT_TRUE(ok_rows);
  EXPECT_EQ(rec.returns.size(), 15u);
  for (double r : rec.returns) EXPECT_LE(std::abs(r), 150.0 * 100.0);
}

TEST(Lifelong, Baseline2RowsFollowTheRegistry) {
  MazeEnv env{MazeConfig{}};
  auto setup = small_maze(env, 7, 2);
  std::vector<int> rows;
  DirectPolicy carried;
  bool ok_carry = true;
  auto ev = [&](const LifelongEvent& e) {
    const auto& d = *e.direct;
    if (e.phase == LifelongPhase::before_change) carried = d;
    if (e.phase == LifelongPhase::after_change) {
      rows.push_back(d.rows());
      if (carried.rows() == 0) return;
      const Eigen::Index old = carried.rows();
      ok_carry &= d.trunk().params() == carried.trunk().params();
      ok_carry &= d.logit_weights().topRows(old) == carried.logit_weights();
      ok_carry &= d.logit_bias().head(old) == carried.logit_bias();
    }
  };
  auto rec = run_lifelong(setup, Algorithm::baseline2, quick_agent(), 3, ev);
  ASSERT_FALSE(rec.fault);
  EXPECT_EQ(rows, (std::vector<int>{52, 103, 154, 205, 256}));
  EXPECT_TRUE(ok_carry);
}

TEST(Lifelong, Baseline1ReinitIgnoresHistory) {
  MazeEnv env{MazeConfig{}};
  auto setup = small_maze(env, 9, 4);
  auto run = [&](double lr) {
    auto agent = quick_agent();
    agent.direct_improvement.lr_actor = lr;
    std::vector<std::vector<double>> snaps;
    run_lifelong(setup, Algorithm::baseline1, agent, 5, [&](const LifelongEvent& e) {
      if (e.phase == LifelongPhase::after_change) snaps.push_back(flat(*e.direct));
    });
    return snaps;
  };
  auto a = run(0.0), b = run(0.05);
  ASSERT_EQ(a.size(), 5u);
  // different training histories, identical post-change parameters
  for (size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]) << "change " << k;
}

TEST(Lifelong, AllAlgorithmsShareTheSchedule) {
  MazeEnv env{MazeConfig{}};
  auto setup = small_maze(env, 2, 2);
  auto agent = quick_agent();
  auto a = run_lifelong(setup, Algorithm::laica_ac, agent, 1);
  auto b = run_lifelong(setup, Algorithm::baseline1, agent, 1);
  auto c = run_lifelong(setup, Algorithm::baseline2, agent, 1);
  EXPECT_EQ(a.change_episodes, b.change_episodes);
  EXPECT_EQ(b.change_episodes, c.change_episodes);
  EXPECT_EQ(a.returns.size(), b.returns.size());
}

TEST(Lifelong, TrialIsDeterministic) {
  MazeEnv env{MazeConfig{}};
  auto setup = small_maze(env, 4, 3);
  auto agent = quick_agent();
  for (auto alg : {Algorithm::laica_ac, Algorithm::baseline2}) {
    auto a = run_lifelong(setup, alg, agent, 8);
    auto b = run_lifelong(setup, alg, agent, 8);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  }
}

TEST(Lifelong, BadScheduleIsAFault) {
  MazeEnv env{MazeConfig{}};
  auto setup = small_maze(env, 4, 3);
  setup.schedule.change_episodes[0] = 1;
  auto rec = run_lifelong(setup, Algorithm::baseline2, quick_agent(), 0);
  EXPECT_TRUE(rec.fault.has_value());
}
