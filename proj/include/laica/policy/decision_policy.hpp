#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "laica/approx/param_map.hpp"

namespace laica {

struct DecisionPolicyConfig {
  int latent_dim = 2;
  std::vector<int> hidden;  // empty: affine map from features
  double log_std = 0.0;
  bool learn_log_std = false;
};

struct LatentSample {
  Vec e_hat;
  Vec mean;
  double log_prob = 0.0;
};

// beta: isotropic Gaussian over the inferred latent space. Nothing here depends
// on how many actions exist.
class DecisionPolicy {
 public:
  DecisionPolicy() = default;
  DecisionPolicy(int feature_dim, const DecisionPolicyConfig& cfg, Rng& rng)
      : mean_map_(ParamMap::mlp(feature_dim, cfg.hidden, cfg.latent_dim)),
        log_std_(cfg.log_std),
        learn_log_std_(cfg.learn_log_std) {
    mean_map_.init_uniform(rng);
  }

  int latent_dim() const { return mean_map_.output_dim(); }
  double log_std() const { return log_std_; }
  double std_dev() const { return std::exp(log_std_); }
  bool learns_log_std() const { return learn_log_std_; }
  const ParamMap& mean_map() const { return mean_map_; }
  ParamMap& mean_map() { return mean_map_; }

  // Mean-map parameters followed by the shared log-std.
  Eigen::Index parameter_count() const { return mean_map_.size() + 1; }

  Vec params() const {
    Vec p(parameter_count());
    p << mean_map_.params(), log_std_;
    return p;
  }

  void set_params(const Vec& p) {
    if (p.size() != parameter_count()) throw ShapeError("decision policy: parameter length mismatch");
    mean_map_.set_params(p.head(mean_map_.size()));
    log_std_ = p[p.size() - 1];
  }

  Vec mean(const Vec& features) const { return mean_map_.forward(features); }

  double log_prob(const Vec& features, const Vec& e) const { return log_density(e, mean(features)); }

  double log_density(const Vec& e, const Vec& mu) const {
    double d = static_cast<double>(mu.size());
    double var = std::exp(2.0 * log_std_);
    return -0.5 * (e - mu).squaredNorm() / var - d * log_std_ - 0.5 * d * std::log(2.0 * std::numbers::pi);
  }

  LatentSample sample(const Vec& features, Rng& rng) const {
    LatentSample s;
    s.mean = mean(features);
    if (!s.mean.allFinite()) throw Divergence("decision policy produced a non-finite mean");
    s.e_hat = s.mean + std_dev() * rng.normal_vec(s.mean.size());
    s.log_prob = log_density(s.e_hat, s.mean);
    return s;
  }

  // Gradient of log N(e; mean(features), sigma^2 I) with respect to params();
  // the log-std entry is zero unless it is learned.
  Vec score(const Vec& features, const Vec& e) const {
    auto tape = mean_map_.forward_tape(features);
    double var = std::exp(2.0 * log_std_);
    Vec diff = e - tape.output;
    Vec g = Vec::Zero(parameter_count());
    Vec gm = Vec::Zero(mean_map_.size());
    mean_map_.backward(tape, diff / var, gm);
    g.head(mean_map_.size()) = gm;
    if (learn_log_std_) g[g.size() - 1] = diff.squaredNorm() / var - static_cast<double>(diff.size());
    return g;
  }

 private:
  ParamMap mean_map_;
  double log_std_ = 0.0;
  bool learn_log_std_ = false;
};

}  // namespace laica
