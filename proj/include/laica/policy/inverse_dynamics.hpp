#pragma once

#include <algorithm>
#include <vector>

#include "laica/approx/param_map.hpp"

namespace laica {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

struct InverseDynamicsConfig {
  std::vector<int> hidden{64};
};

// phi: Gaussian over the inferred latent space given a transition (s, s').
// The encoder reads [features(s); features(s')] and emits [mean; raw log-std].
class InverseDynamics {
 public:
  struct Encoding {
    Vec mean;
    Vec std;
    Vec raw_log_std;
    ParamMap::Tape tape;
  };

  struct TransitionSample {
    Vec e_sample;
    Vec mean;
    Vec std;
  };

  InverseDynamics() = default;
  InverseDynamics(int feature_dim, int latent_dim, const InverseDynamicsConfig& cfg, Rng& rng)
      : encoder_(ParamMap::mlp(2 * feature_dim, cfg.hidden, 2 * latent_dim)), latent_dim_(latent_dim) {
    encoder_.init_uniform(rng);
  }

  int latent_dim() const { return latent_dim_; }
  const ParamMap& encoder() const { return encoder_; }
  ParamMap& encoder() { return encoder_; }

  Encoding encode(const Vec& features, const Vec& next_features) const {
    Vec in(features.size() + next_features.size());
    in << features, next_features;
    Encoding enc;
    enc.tape = encoder_.forward_tape(in);
    const Vec& out = enc.tape.output;
    if (!out.allFinite()) throw Divergence("inverse dynamics produced a non-finite output");
    enc.mean = out.head(latent_dim_);
    enc.raw_log_std = out.tail(latent_dim_);
    enc.std = enc.raw_log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax).array().exp().matrix();
    return enc;
  }

  // Reparameterized draw e = mean + std * z with the supplied noise z.
  TransitionSample encode_transition(const Vec& features, const Vec& next_features, const Vec& z) const {
    Encoding enc = encode(features, next_features);
    return {enc.mean + enc.std.cwiseProduct(z), enc.mean, enc.std};
  }

  TransitionSample encode_transition(const Vec& features, const Vec& next_features, Rng& rng) const {
    return encode_transition(features, next_features, rng.normal_vec(latent_dim_));
  }

  // Accumulates encoder parameter gradients given dL/dmean and dL/dstd.
  // The clamp passes no gradient outside [kLogStdMin, kLogStdMax].
  void backward(const Encoding& enc, const Vec& g_mean, const Vec& g_std, Vec& param_grad) const {
    Vec up(2 * latent_dim_);
    up.head(latent_dim_) = g_mean;
    for (int i = 0; i < latent_dim_; ++i) {
      double raw = enc.raw_log_std[i];
      bool inside = raw >= kLogStdMin && raw <= kLogStdMax;
      up[latent_dim_ + i] = inside ? g_std[i] * enc.std[i] : 0.0;
    }
    encoder_.backward(enc.tape, up, param_grad);
  }

 private:
  ParamMap encoder_;
  int latent_dim_ = 0;
};

}  // namespace laica
