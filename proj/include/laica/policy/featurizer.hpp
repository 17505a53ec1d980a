#pragma once

#include "laica/approx/fourier.hpp"

namespace laica {

enum class FeatureKind { fourier, identity };

// State featurizer shared by every learned map of one agent. `identity` passes
// the observation through (used for one-hot tabular states).
class Featurizer {
 public:
  Featurizer() = default;
  static Featurizer fourier(int order, int input_dim) {
    Featurizer f;
    f.kind_ = FeatureKind::fourier;
    f.input_dim_ = input_dim;
    f.fourier_ = FourierFeatures(order, input_dim);
    return f;
  }
  static Featurizer identity(int input_dim) {
    Featurizer f;
    f.kind_ = FeatureKind::identity;
    f.input_dim_ = input_dim;
    return f;
  }

  FeatureKind kind() const { return kind_; }
  int input_dim() const { return input_dim_; }
  int size() const { return kind_ == FeatureKind::fourier ? fourier_.size() : input_dim_; }

  Vec operator()(const Vec& obs) const {
    if (kind_ == FeatureKind::fourier) return fourier_(obs);
    if (obs.size() != input_dim_) throw ShapeError("featurizer: observation dimension mismatch");
    return obs;
  }

 private:
  FeatureKind kind_ = FeatureKind::identity;
  int input_dim_ = 0;
  FourierFeatures fourier_;
};

}  // namespace laica
