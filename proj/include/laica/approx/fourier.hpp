#pragma once

#include <cmath>
#include <numbers>

#include "laica/errors.hpp"
#include "laica/rng.hpp"

namespace laica {

// Coupled Fourier basis: one feature cos(pi c.x) for every integer frequency
// vector c in {0..order}^input_dim. Inputs must already be scaled to [0,1].
class FourierFeatures {
 public:
  FourierFeatures() = default;
  FourierFeatures(int order, int input_dim) : order_(order), input_dim_(input_dim) {
    if (order < 0 || input_dim < 1) throw DomainError("fourier basis: invalid order or input dimension");
    int n = 1;
    for (int i = 0; i < input_dim; ++i) n *= order + 1;
    coefficients_.resize(n, input_dim);
    for (int row = 0; row < n; ++row) {
      int r = row;
      for (int d = 0; d < input_dim; ++d) {
        coefficients_(row, d) = r % (order + 1);
        r /= order + 1;
      }
    }
  }

  int order() const { return order_; }
  int input_dim() const { return input_dim_; }
  int size() const { return static_cast<int>(coefficients_.rows()); }
  const Mat& coefficients() const { return coefficients_; }

  Vec operator()(const Vec& x) const {
    if (x.size() != input_dim_) throw ShapeError("fourier basis: input dimension mismatch");
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (!(x[i] >= 0.0 && x[i] <= 1.0)) throw DomainError("fourier basis: input outside [0,1], missing normalization?");
    return (std::numbers::pi * (coefficients_ * x)).array().cos().matrix();
  }

 private:
  int order_ = 0;
  int input_dim_ = 0;
  Mat coefficients_;
};

}  // namespace laica
