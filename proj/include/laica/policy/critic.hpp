#pragma once

#include <cmath>
#include <vector>

#include "laica/approx/param_map.hpp"

namespace laica {

struct CriticConfig {
  std::vector<int> hidden;  // empty: linear in features
};

// State-value critic trained by TD(lambda) with an accumulating eligibility trace.
class Critic {
 public:
  Critic() = default;
  Critic(int feature_dim, const CriticConfig& cfg, Rng& rng) : value_map_(ParamMap::mlp(feature_dim, cfg.hidden, 1)) {
    value_map_.init_uniform(rng);
    reset_trace();
  }

  const ParamMap& value_map() const { return value_map_; }
  ParamMap& value_map() { return value_map_; }
  const Vec& trace() const { return trace_; }

  void reset_trace() { trace_ = Vec::Zero(value_map_.size()); }

  double value(const Vec& features) const { return value_map_.forward(features)[0]; }

  // delta = r + gamma v(s') (1 - terminal) - v(s);
  // trace <- gamma trace_decay trace + grad v(s); params += lr delta trace.
  double update(const Vec& features, double reward, const Vec& next_features, bool terminal, double gamma,
                double trace_decay, double lr) {
    if (trace_.size() != value_map_.size()) throw ShapeError("critic: trace not initialized for this episode");
    Vec one = Vec::Ones(1);
    auto pass = value_map_.forward_backward(features, one);
    double next_v = terminal ? 0.0 : value(next_features);
    double delta = reward + gamma * next_v - pass.output[0];
    if (!std::isfinite(delta)) throw Divergence("critic TD error is not finite");
    trace_ = gamma * trace_decay * trace_ + pass.parameter_gradient;
    value_map_.params() += lr * delta * trace_;
    return delta;
  }

 private:
  ParamMap value_map_;
  Vec trace_;
};

}  // namespace laica
