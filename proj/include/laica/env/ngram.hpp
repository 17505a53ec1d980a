#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "laica/core/environment.hpp"

namespace laica {

// Synthetic recommender-style MDP. The state is the feature window of the last
// n consumed items; the action recommends a catalog item (its latent is the
// item's feature vector). The next consumed item j has logit
//   f_j . M [state ; e]
// so transitions are smooth in the recommended item's features.
struct NgramModel {
  int n_items = 0;
  int n_value = 1;
  int feature_dim = 2;
  Mat item_features;     // n_items x feature_dim, entries in [0,1]
  Mat interaction;       // feature_dim x (n_value*feature_dim + feature_dim)
  Vec reward_per_item;   // in [0,1]
  double gamma = 0.9;
  int horizon = 20;

  int state_dim() const { return n_value * feature_dim; }
};

inline NgramModel generate_ngram(std::uint64_t seed, int n_items, int n_value, int feature_dim,
                                   double logit_scale = 4.0) {
  if (n_items < 10) throw DomainError("generate_ngram: need at least 10 items");
  if (n_value < 1 || feature_dim < 1) throw DomainError("generate_ngram: invalid sizes");
  Rng rng(seed);
  NgramModel s;
  s.n_items = n_items;
  s.n_value = n_value;
  s.feature_dim = feature_dim;
  s.item_features.resize(n_items, feature_dim);
  for (int i = 0; i < n_items; ++i)
    for (int k = 0; k < feature_dim; ++k) s.item_features(i, k) = rng.uniform();
  int cols = s.state_dim() + feature_dim;
  s.interaction.resize(feature_dim, cols);
  double scale = logit_scale / std::sqrt(static_cast<double>(cols));
  for (int r = 0; r < feature_dim; ++r)
    for (int c = 0; c < cols; ++c) s.interaction(r, c) = scale * rng.normal();
  s.reward_per_item.resize(n_items);
  for (int i = 0; i < n_items; ++i) s.reward_per_item[i] = rng.uniform();
  return s;
}

class NgramEnv final : public Environment {
 public:
  explicit NgramEnv(NgramModel model) : s_(std::move(model)) {
    base_.observation_dim = s_.state_dim();
    base_.gamma = s_.gamma;
    base_.r_max = std::max(1e-12, s_.reward_per_item.cwiseAbs().maxCoeff());
    base_.horizon = s_.horizon;
  }

  const NgramModel& model() const { return s_; }
  const BaseMdpInfo& info() const override { return base_; }
  int latent_dim() const override { return s_.feature_dim; }

  LatentActionSpace latent_space() const { return LatentActionSpace::unit_box(s_.feature_dim); }

  std::vector<Vec> item_latents() const {
    std::vector<Vec> out;
    for (int i = 0; i < s_.n_items; ++i) out.push_back(s_.item_features.row(i).transpose());
    return out;
  }

  Vec observation(const std::vector<int>& history) const {
    Vec obs(s_.state_dim());
    for (int k = 0; k < s_.n_value; ++k)
      obs.segment(k * s_.feature_dim, s_.feature_dim) = s_.item_features.row(history[static_cast<size_t>(k)]).transpose();
    return obs;
  }

  EnvState state_of(std::vector<int> history) const {
    EnvState st;
    st.obs = observation(history);
    st.history = std::move(history);
    return st;
  }

  Vec next_item_logits(const Vec& obs, const Vec& latent) const {
    Vec joint(obs.size() + latent.size());
    joint << obs, latent;
    return s_.item_features * (s_.interaction * joint);
  }

  Vec next_item_distribution(const Vec& obs, const Vec& latent) const {
    Vec l = next_item_logits(obs, latent);
    Vec p = (l.array() - l.maxCoeff()).exp();
    return p / p.sum();
  }

  EnvState reset(Rng& rng) const override {
    std::vector<int> h(static_cast<size_t>(s_.n_value));
    for (auto& i : h) i = rng.uniform_int(s_.n_items);
    return state_of(std::move(h));
  }

  StepResult step(const EnvState& state, const Vec& latent, Rng& rng) const override {
    int next = rng.categorical(next_item_distribution(state.obs, latent));
    std::vector<int> h(state.history.begin() + 1, state.history.end());
    h.push_back(next);
    StepResult r;
    r.next = state_of(std::move(h));
    r.next.index = next;
    r.next.t = state.t + 1;
    r.reward = s_.reward_per_item[next];
    r.terminal = r.next.t >= s_.horizon;
    r.next.terminal = r.terminal;
    return r;
  }

 private:
  NgramModel s_;
  BaseMdpInfo base_;
};

}  // namespace laica
