#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>

#include "laica/laica.hpp"

using namespace laica;

TEST(Fourier, ZeroInputGivesOnes) {
  FourierFeatures f(3, 2);
  EXPECT_EQ(f.size(), 16);
  EXPECT_EQ(f(Vec::Zero(2)), Vec::Ones(16));
}

TEST(Fourier, HalfPiComponent) {
  FourierFeatures f(3, 2);
  Vec x(2);
  x << 0.5, 0.0;
  Vec phi = f(x);
  for (int r = 0; r < f.size(); ++r)
    if (f.coefficients()(r, 0) == 1 && f.coefficients()(r, 1) == 0) EXPECT_NEAR(phi[r], 0.0, 1e-12);
}

TEST(Fourier, FeatureCountAndBounds) {
  EXPECT_EQ(FourierFeatures(2, 3).size(), 27);
  FourierFeatures f(3, 2);
  Rng rng(0);
  for (int i = 0; i < 500; ++i) {
    Vec x(2);
    x << rng.uniform(), rng.uniform();
    Vec phi = f(x);
    EXPECT_LE(phi.cwiseAbs().maxCoeff(), 1.0);
    // independent evaluation of every frequency vector
    for (int c0 = 0; c0 <= 3; ++c0)
      for (int c1 = 0; c1 <= 3; ++c1) {
        double expect = std::cos(std::numbers::pi * (c0 * x[0] + c1 * x[1]));
        bool found = false;
        for (int r = 0; r < 16; ++r)
          if (f.coefficients()(r, 0) == c0 && f.coefficients()(r, 1) == c1) {
            EXPECT_NEAR(phi[r], expect, 1e-14);
            found = true;
          }
        EXPECT_TRUE(found);
      }
  }
}

TEST(Fourier, OutOfRangeFaults) {
  FourierFeatures f(3, 2);
  Vec x(2);
  x << 1.2, 0.3;
  EXPECT_THROW(f(x), DomainError);
}

TEST(ParamMap, IdentityAffineBiasGradient) {
  ParamMap m = ParamMap::mlp(2, {}, 2);
  Vec p = Vec::Zero(m.size());
  p[0] = 1.0;
  p[3] = 1.0;  // W = I
  m.set_params(p);
  Vec x(2);
  x << 0.3, -0.7;
  Vec u = Vec::Zero(2);
  u[0] = 1.0;
  auto pass = m.forward_backward(x, u);
  EXPECT_EQ(pass.output, x);
  EXPECT_EQ(pass.parameter_gradient[4], 1.0);  // bias of output 0
  EXPECT_EQ(pass.parameter_gradient[5], 0.0);
  EXPECT_EQ(pass.input_gradient, u);
}

TEST(ParamMap, ZeroUpstreamGivesZeroGradients) {
  Rng rng(1);
  ParamMap m = ParamMap::mlp(3, {5}, 2);
  m.init_uniform(rng);
  auto pass = m.forward_backward(Vec::Ones(3), Vec::Zero(2));
  EXPECT_EQ(pass.parameter_gradient.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(pass.input_gradient.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ParamMap, ShapeMismatchFaults) {
  ParamMap m = ParamMap::mlp(3, {}, 2);
  EXPECT_THROW(m.forward(Vec::Ones(2)), ShapeError);
  EXPECT_THROW(m.forward_backward(Vec::Ones(3), Vec::Ones(3)), ShapeError);
  EXPECT_THROW(m.set_params(Vec::Ones(2)), ShapeError);
  EXPECT_THROW(ParamMap({{3, 4, Activation::tanh}, {5, 1, Activation::identity}}), ShapeError);
}

TEST(ParamMap, ForwardIsDeterministic) {
  Rng rng(2);
  ParamMap m = ParamMap::mlp(4, {8, 8}, 3);
  m.init_uniform(rng);
  Vec x = rng.normal_vec(4);
  EXPECT_EQ(m.forward(x), m.forward(x));
}

TEST(ParamMap, InitWithinFanInBound) {
  Rng rng(3);
  ParamMap m = ParamMap::mlp(16, {4}, 2);
  m.init_uniform(rng);
  EXPECT_LE(m.params().head(16 * 4 + 4).cwiseAbs().maxCoeff(), 0.25);
  EXPECT_LE(m.params().tail(4 * 2 + 2).cwiseAbs().maxCoeff(), 0.5);
}

TEST(GradientCheck, AffineMapIsExact) {
  Rng rng(4);
  ParamMap m = ParamMap::mlp(3, {}, 2);
  m.init_uniform(rng);
  EXPECT_LE(gradient_check(m, 5, 1e-5, rng), 1e-8);
}

TEST(GradientCheck, EveryShippedTopology) {
  Rng rng(5);
  std::vector<ParamMap> maps{ParamMap::mlp(16, {}, 2),         ParamMap::mlp(16, {64}, 1),
                             ParamMap::mlp(32, {64}, 4),       ParamMap::mlp(16, {64, 64}, 3),
                             ParamMap::mlp(5, {}, 1),          ParamMap::mlp(4, {8}, 2, Activation::tanh, Activation::tanh)};
  for (auto& m : maps) {
    m.init_uniform(rng);
    EXPECT_LE(gradient_check(m, 3, 1e-5, rng), 1e-4);
  }
}

TEST(GradientCheck, CorruptedGradientIsDetected) {
  Rng rng(6);
  ParamMap m = ParamMap::mlp(3, {4}, 1);
  m.init_uniform(rng);
  Vec x = rng.normal_vec(3);
  Vec u = Vec::Ones(1);
  auto pass = m.forward_backward(x, u);
  Vec bad = pass.parameter_gradient.array() + 0.1;
  ParamMap probe = m;
  auto f = [&](const Vec& p) {
    probe.set_params(p);
    return probe.forward(x)[0];
  };
  EXPECT_LE(check_gradient(f, pass.parameter_gradient, m.params(), 1e-5), 1e-4);
  EXPECT_GT(check_gradient(f, bad, m.params(), 1e-5), 1e-2);
  Vec nan = pass.parameter_gradient;
  nan[0] = std::nan("");
  EXPECT_THROW(check_gradient(f, nan, m.params(), 1e-5), DomainError);
}

TEST(Optimizer, SgdStep) {
  Optimizer opt(OptimizerConfig{OptimizerKind::sgd, 0.1});
  Vec p = Vec::Ones(2), g(2);
  g << 1.0, -2.0;
  opt.descend(p, g);
  EXPECT_NEAR(p[0], 0.9, 1e-15);
  EXPECT_NEAR(p[1], 1.2, 1e-15);
}

TEST(Optimizer, AdamFirstStepIsLearningRateTimesSign) {
  Optimizer opt(OptimizerConfig{OptimizerKind::adam, 0.01});
  Vec p = Vec::Zero(3), g(3);
  g << 5.0, -0.001, 2.0;
  opt.descend(p, g);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p[i], -0.01 * (g[i] > 0 ? 1 : -1), 1e-6);
}

TEST(Optimizer, AdamMinimizesQuadraticAndIsDeterministic) {
  auto run = [] {
    Optimizer opt(OptimizerConfig{OptimizerKind::adam, 0.05});
    Vec p = Vec::Constant(2, 3.0);
    Vec target(2);
    target << -1.0, 2.0;
    for (int i = 0; i < 2000; ++i) opt.descend(p, 2.0 * (p - target));
    return std::make_pair(p, target);
  };
  auto [p, target] = run();
  EXPECT_LT((p - target).norm(), 1e-3);
  EXPECT_EQ(run().first, p);
  EXPECT_THROW(Optimizer(OptimizerConfig{OptimizerKind::adam, 0.0}), DomainError);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Rng rng(7);
  ParamMap m = ParamMap::mlp(5, {7}, 3);
  m.init_uniform(rng);
  auto dir = std::filesystem::temp_directory_path() / "laica_ckpt_test";
  std::filesystem::create_directories(dir);
  save_checkpoint(m, dir / "map");
  EXPECT_EQ(std::filesystem::file_size(dir / "map.bin"), static_cast<std::uintmax_t>(8 * m.size()));
  auto back = load_checkpoint(dir / "map");
  EXPECT_EQ(back.layers(), m.layers());
  EXPECT_EQ(back.params(), m.params());
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, LittleEndianLayout) {
  std::ostringstream os;
  write_le_doubles(os, Vec::Ones(1));
  std::string s = os.str();
  ASSERT_EQ(s.size(), 8u);
  // 1.0 = 0x3FF0000000000000
  EXPECT_EQ(static_cast<unsigned char>(s[7]), 0x3F);
  EXPECT_EQ(static_cast<unsigned char>(s[6]), 0xF0);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(s[static_cast<size_t>(i)], 0);
}
