#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "laica/approx/param_map.hpp"
#include "laica/policy/featurizer.hpp"

namespace laica {

struct DirectPolicyConfig {
  std::vector<int> hidden{64};  // tanh trunk; empty means logits straight from features
};

// Softmax policy acting on discrete action ids. The final layer carries one
// row per registered action and grows by stacking.
class DirectPolicy {
 public:
  struct Gradient {
    Vec trunk;
    Mat logit_w;
    Vec logit_b;
  };

  DirectPolicy() = default;
  DirectPolicy(int feature_dim, const DirectPolicyConfig& cfg, Rng& rng) : feature_dim_(feature_dim) {
    if (!cfg.hidden.empty()) {
      std::vector<int> inner(cfg.hidden.begin(), cfg.hidden.end() - 1);
      trunk_ = ParamMap::mlp(feature_dim, inner, cfg.hidden.back(), Activation::tanh, Activation::tanh);
      trunk_.init_uniform(rng);
      has_trunk_ = true;
    }
    logit_w_ = Mat(0, head_dim());
    logit_b_ = Vec(0);
  }

  int head_dim() const { return has_trunk_ ? trunk_.output_dim() : feature_dim_; }
  int rows() const { return static_cast<int>(logit_w_.rows()); }
  const Mat& logit_weights() const { return logit_w_; }
  const Vec& logit_bias() const { return logit_b_; }
  const ParamMap& trunk() const { return trunk_; }
  bool has_trunk() const { return has_trunk_; }

  Eigen::Index parameter_count() const {
    return (has_trunk_ ? trunk_.size() : 0) + logit_w_.size() + logit_b_.size();
  }

  // New rows (weights and bias) uniform in +-1/sqrt(head_dim).
  void stack_rows(int n_new, Rng& rng) {
    if (n_new < 1) throw DomainError("direct policy: need at least one new row");
    Eigen::Index old = logit_w_.rows();
    logit_w_.conservativeResize(old + n_new, Eigen::NoChange);
    logit_b_.conservativeResize(old + n_new);
    double bound = 1.0 / std::sqrt(static_cast<double>(head_dim()));
    for (Eigen::Index r = old; r < logit_w_.rows(); ++r) {
      for (Eigen::Index c = 0; c < logit_w_.cols(); ++c) logit_w_(r, c) = rng.uniform(-bound, bound);
      logit_b_[r] = rng.uniform(-bound, bound);
    }
  }

  Vec probabilities(const Vec& features, std::span<const int> ids) const {
    return softmax(head(features), ids);
  }

  // Probabilities over `ids` plus grad log pi(action|s) w.r.t. every parameter;
  // unavailable rows receive exactly zero gradient.
  Vec log_prob_gradient(const Vec& features, std::span<const int> ids, int action, Gradient& g) const {
    ParamMap::Tape tape;
    Vec h = features;
    if (has_trunk_) {
      tape = trunk_.forward_tape(features);
      h = tape.output;
    }
    Vec p = softmax(h, ids);
    g.logit_w = Mat::Zero(logit_w_.rows(), logit_w_.cols());
    g.logit_b = Vec::Zero(logit_b_.size());
    Vec gh = Vec::Zero(h.size());
    for (size_t i = 0; i < ids.size(); ++i) {
      double coef = (ids[i] == action ? 1.0 : 0.0) - p[static_cast<Eigen::Index>(i)];
      g.logit_w.row(ids[i]) = coef * h.transpose();
      g.logit_b[ids[i]] = coef;
      gh += coef * logit_w_.row(ids[i]).transpose();
    }
    g.trunk = Vec::Zero(has_trunk_ ? trunk_.size() : 0);
    if (has_trunk_) trunk_.backward(tape, gh, g.trunk);
    return p;
  }

  void add_scaled(const Gradient& step, double scale) {
    if (has_trunk_) trunk_.params() += scale * step.trunk;
    logit_w_ += scale * step.logit_w;
    logit_b_ += scale * step.logit_b;
  }

  bool all_finite() const {
    return (!has_trunk_ || trunk_.all_finite()) && logit_w_.allFinite() && logit_b_.allFinite();
  }

 private:
  Vec head(const Vec& features) const { return has_trunk_ ? trunk_.forward(features) : features; }

  Vec softmax(const Vec& h, std::span<const int> ids) const {
    if (ids.empty()) throw NoAvailableActions();
    Vec z(static_cast<Eigen::Index>(ids.size()));
    for (size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < 0 || ids[i] >= rows()) throw DomainError("direct policy: no logit row for action");
      z[static_cast<Eigen::Index>(i)] = logit_w_.row(ids[i]).dot(h) + logit_b_[ids[i]];
    }
    Vec p = (z.array() - z.maxCoeff()).exp();
    return p / p.sum();
  }

  int feature_dim_ = 0;
  bool has_trunk_ = false;
  ParamMap trunk_;
  Mat logit_w_;
  Vec logit_b_;
};

}  // namespace laica
