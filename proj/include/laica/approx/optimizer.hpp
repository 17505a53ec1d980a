#pragma once

#include <cmath>

#include "laica/errors.hpp"
#include "laica/rng.hpp"

namespace laica {

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Gradient-descent step on a flat parameter vector. The moment accumulators are
// sized lazily on the first step and reset if the parameter count changes.
class Optimizer {
 public:
  Optimizer() = default;
  explicit Optimizer(OptimizerConfig cfg) : cfg_(cfg) {
    if (!(cfg_.learning_rate > 0)) throw DomainError("optimizer learning rate must be positive");
  }

  const OptimizerConfig& config() const { return cfg_; }

  void descend(Vec& params, const Vec& grad) {
    if (params.size() != grad.size()) throw ShapeError("optimizer: gradient length mismatch");
    if (cfg_.kind == OptimizerKind::sgd) {
      params -= cfg_.learning_rate * grad;
      return;
    }
    if (m_.size() != params.size()) {
      m_ = Vec::Zero(params.size());
      v_ = Vec::Zero(params.size());
      t_ = 0;
    }
    ++t_;
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
    v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseAbs2();
    double c1 = 1.0 - std::pow(cfg_.beta1, t_);
    double c2 = 1.0 - std::pow(cfg_.beta2, t_);
    params.array() -= cfg_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.epsilon);
  }

  void ascend(Vec& params, const Vec& grad) { descend(params, -grad); }

  void reset() {
    m_.resize(0);
    v_.resize(0);
    t_ = 0;
  }

 private:
  OptimizerConfig cfg_;
  Vec m_, v_;
  long t_ = 0;
};

}  // namespace laica
