#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "laica/errors.hpp"
#include "laica/rng.hpp"

namespace laica {

enum class Activation { identity, tanh };

inline std::string to_string(Activation a) { return a == Activation::tanh ? "tanh" : "identity"; }
inline Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::tanh;
  if (s == "identity") return Activation::identity;
  throw DomainError("unknown activation: " + s);
}

struct LayerShape {
  int in = 0;
  int out = 0;
  Activation act = Activation::identity;
  bool operator==(const LayerShape&) const = default;
};

// Stack of affine layers over one flat parameter vector. Layer l stores its
// weights row-major (out x in) followed by its bias.
class ParamMap {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

 public:
  // Activations recorded by a forward pass for a later backward pass.
  struct Tape {
    std::vector<Vec> inputs;  // input to each layer
    Vec output;
  };

  struct Pass {
    Vec output;
    Vec input_gradient;
    Vec parameter_gradient;
  };

  ParamMap() = default;
  explicit ParamMap(std::vector<LayerShape> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw ShapeError("param map needs at least one layer");
    Eigen::Index n = 0;
    for (size_t l = 0; l < layers_.size(); ++l) {
      if (layers_[l].in < 1 || layers_[l].out < 1) throw ShapeError("param map layer sizes must be positive");
      if (l > 0 && layers_[l].in != layers_[l - 1].out) throw ShapeError("param map layer sizes do not chain");
      offsets_.push_back(n);
      n += static_cast<Eigen::Index>(layers_[l].in + 1) * layers_[l].out;
    }
    params_ = Vec::Zero(n);
  }

  // Affine layers with `hidden` tanh layers in between; identity output.
  static ParamMap mlp(int in, const std::vector<int>& hidden, int out, Activation hidden_act = Activation::tanh,
                      Activation out_act = Activation::identity) {
    std::vector<LayerShape> layers;
    int prev = in;
    for (int h : hidden) {
      layers.push_back({prev, h, hidden_act});
      prev = h;
    }
    layers.push_back({prev, out, out_act});
    return ParamMap(std::move(layers));
  }

  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer.
  void init_uniform(Rng& rng) {
    for (size_t l = 0; l < layers_.size(); ++l) {
      double bound = 1.0 / std::sqrt(static_cast<double>(layers_[l].in));
      Eigen::Index n = static_cast<Eigen::Index>(layers_[l].in + 1) * layers_[l].out;
      for (Eigen::Index i = 0; i < n; ++i) params_[offsets_[l] + i] = rng.uniform(-bound, bound);
    }
  }

  int input_dim() const { return layers_.front().in; }
  int output_dim() const { return layers_.back().out; }
  Eigen::Index size() const { return params_.size(); }
  const std::vector<LayerShape>& layers() const { return layers_; }
  const Vec& params() const { return params_; }
  Vec& params() { return params_; }
  void set_params(const Vec& p) {
    if (p.size() != params_.size()) throw ShapeError("param map: parameter vector length mismatch");
    params_ = p;
  }

  Vec forward(const Vec& x) const { return forward_tape(x).output; }

  Tape forward_tape(const Vec& x) const {
    if (x.size() != input_dim()) throw ShapeError("param map: input dimension mismatch");
    Tape tape;
    tape.inputs.reserve(layers_.size());
    Vec h = x;
    for (size_t l = 0; l < layers_.size(); ++l) {
      tape.inputs.push_back(h);
      Vec z = weights(l) * h + bias(l);
      if (layers_[l].act == Activation::tanh) z = z.array().tanh().matrix();
      h = std::move(z);
    }
    tape.output = std::move(h);
    return tape;
  }

  // Accumulates d(upstream . output)/d(params) into `param_grad` and returns the
  // gradient with respect to the input.
  Vec backward(const Tape& tape, const Vec& upstream, Vec& param_grad) const {
    if (upstream.size() != output_dim()) throw ShapeError("param map: upstream gradient dimension mismatch");
    if (param_grad.size() != params_.size()) throw ShapeError("param map: gradient buffer length mismatch");
    Vec g = upstream;
    Vec out = tape.output;
    for (size_t li = layers_.size(); li-- > 0;) {
      const auto& layer = layers_[li];
      if (layer.act == Activation::tanh) g = g.cwiseProduct((1.0 - out.array().square()).matrix());
      const Vec& in = tape.inputs[li];
      Eigen::Map<RowMat> gw(param_grad.data() + offsets_[li], layer.out, layer.in);
      gw.noalias() += g * in.transpose();
      param_grad.segment(offsets_[li] + static_cast<Eigen::Index>(layer.out) * layer.in, layer.out) += g;
      Vec gin = weights(li).transpose() * g;
      out = in;
      g = std::move(gin);
    }
    return g;
  }

  Pass forward_backward(const Vec& x, const Vec& upstream) const {
    Tape tape = forward_tape(x);
    Pass p;
    p.parameter_gradient = Vec::Zero(params_.size());
    p.input_gradient = backward(tape, upstream, p.parameter_gradient);
    p.output = std::move(tape.output);
    return p;
  }

  bool all_finite() const { return params_.allFinite(); }

 private:
  Eigen::Map<const RowMat> weights(size_t l) const {
    return Eigen::Map<const RowMat>(params_.data() + offsets_[l], layers_[l].out, layers_[l].in);
  }
  Eigen::Map<const Vec> bias(size_t l) const {
    return Eigen::Map<const Vec>(params_.data() + offsets_[l] + static_cast<Eigen::Index>(layers_[l].out) * layers_[l].in,
                                 layers_[l].out);
  }

  std::vector<LayerShape> layers_;
  std::vector<Eigen::Index> offsets_;
  Vec params_;
};

}  // namespace laica
