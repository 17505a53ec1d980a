#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "laica/core/environment.hpp"

namespace laica {

// Axis-aligned wall segment; a step whose straight path crosses it is blocked.
struct WallSegment {
  double x0, y0, x1, y1;
};

struct MazeConfig {
  double step_scale = 0.05;
  double noise_prob = 0.10;
  int horizon = 150;
  double step_penalty = -1.0;
  double goal_reward = 100.0;
  Vec goal_center = Vec::Constant(2, 0.95);
  double goal_radius = 0.05;
  Vec start = Vec::Constant(2, 0.05);
  double gamma = 0.99;
  std::vector<WallSegment> walls;

  void validate() const {
    if (!(step_scale > 0)) throw DomainError("maze step_scale must be positive");
    if (!(noise_prob >= 0 && noise_prob <= 1)) throw DomainError("maze noise_prob must lie in [0,1]");
    if (horizon < 1) throw DomainError("maze horizon must be positive");
    if (!(step_penalty < 0)) throw DomainError("maze step_penalty must be negative");
    if (!(goal_reward > 0)) throw DomainError("maze goal_reward must be positive");
    if (!(goal_radius > 0)) throw DomainError("maze goal_radius must be positive");
    if (goal_center.size() != 2 || start.size() != 2) throw DomainError("maze goal_center/start must be 2-vectors");
    if (!(gamma >= 0 && gamma < 1)) throw DomainError("maze gamma must lie in [0,1)");
  }
};

inline constexpr int kMazeActuators = 8;
inline constexpr int kMazeActions = 1 << kMazeActuators;

// Net displacement of an actuator combination: each set bit i pushes by
// step_scale along angle 2*pi*i/8.
inline Vec maze_latent(int bitmask, double step_scale) {
  if (bitmask < 0 || bitmask >= kMazeActions) throw DomainError("maze bitmask out of range");
  Vec e = Vec::Zero(2);
  for (int i = 0; i < kMazeActuators; ++i) {
    if (!(bitmask & (1 << i))) continue;
    double a = 2.0 * std::numbers::pi * i / kMazeActuators;
    e[0] += std::cos(a);
    e[1] += std::sin(a);
  }
  return step_scale * e;
}

inline std::vector<Vec> maze_action_latents(double step_scale) {
  std::vector<Vec> out;
  for (int m = 0; m < kMazeActions; ++m) out.push_back(maze_latent(m, step_scale));
  return out;
}

// Latent box covering every actuator combination.
inline LatentActionSpace maze_latent_space(double step_scale) {
  double reach = 0.0;
  for (const auto& e : maze_action_latents(step_scale)) reach = std::max(reach, e.cwiseAbs().maxCoeff());
  reach += 1e-9;
  return LatentActionSpace{2, {{-reach, reach}, {-reach, reach}}, 1.0};
}

class MazeEnv final : public Environment {
 public:
  explicit MazeEnv(MazeConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    info_.observation_dim = 2;
    info_.gamma = cfg_.gamma;
    info_.r_max = std::max(std::abs(cfg_.step_penalty), std::abs(cfg_.goal_reward));
    info_.horizon = cfg_.horizon;
  }

  const MazeConfig& config() const { return cfg_; }
  const BaseMdpInfo& info() const override { return info_; }
  int latent_dim() const override { return 2; }

  EnvState reset(Rng&) const override {
    EnvState s;
    s.obs = cfg_.start;
    return s;
  }

  StepResult step(const EnvState& state, const Vec& latent, Rng& rng) const override {
    Vec disp = latent;
    if (cfg_.noise_prob > 0 && rng.bernoulli(cfg_.noise_prob)) {
      disp[0] += rng.uniform(-cfg_.step_scale, cfg_.step_scale);
      disp[1] += rng.uniform(-cfg_.step_scale, cfg_.step_scale);
    }
    return transition(state, disp);
  }

  // Deterministic part of the step given the (possibly perturbed) displacement.
  StepResult transition(const EnvState& state, const Vec& disp) const {
    Vec next = (state.obs + disp).cwiseMax(0.0).cwiseMin(1.0);
    if (blocked(state.obs, next)) next = state.obs;
    StepResult r;
    r.next.obs = next;
    r.next.t = state.t + 1;
    if ((next - cfg_.goal_center).norm() <= cfg_.goal_radius) {
      r.reward = cfg_.goal_reward;
      r.terminal = true;
    } else {
      r.reward = cfg_.step_penalty;
      r.terminal = r.next.t >= cfg_.horizon;
    }
    r.next.terminal = r.terminal;
    return r;
  }

 private:
  bool blocked(const Vec& a, const Vec& b) const {
    for (const auto& w : cfg_.walls) {
      if (w.x0 == w.x1) {  // vertical
        double x = w.x0;
        if ((a[0] - x) * (b[0] - x) >= 0 || a[0] == b[0]) continue;
        double y = a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0]);
        if (y >= std::min(w.y0, w.y1) && y <= std::max(w.y0, w.y1)) return true;
      } else {  // horizontal
        double y = w.y0;
        if ((a[1] - y) * (b[1] - y) >= 0 || a[1] == b[1]) continue;
        double x = a[0] + (b[0] - a[0]) * (y - a[1]) / (b[1] - a[1]);
        if (x >= std::min(w.x0, w.x1) && x <= std::max(w.x0, w.x1)) return true;
      }
    }
    return false;
  }

  MazeConfig cfg_;
  BaseMdpInfo info_;
};

}  // namespace laica
