#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "laica/env/tabular.hpp"
#include "laica/policy/action_selector.hpp"
#include "laica/policy/featurizer.hpp"
#include "laica/policy/inverse_dynamics.hpp"

namespace laica {

inline constexpr double kKlSmoothing = 1e-12;

// sum_s' p log(p / max(q, eps)); counts how many terms needed the floor.
inline double smoothed_kl(const Vec& p, const Vec& q, int* smoothed = nullptr) {
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    double qi = q[i];
    if (qi < kKlSmoothing) {
      qi = kKlSmoothing;
      if (smoothed) ++*smoothed;
    }
    kl += p[i] * std::log(p[i] / qi);
  }
  return std::max(0.0, kl);
}

struct ReconstructionSample {
  int state = 0;
  int action = 0;
  int reconstructed = 0;
  double kl = 0.0;
};

struct ReconstructionReport {
  std::vector<ReconstructionSample> samples;
  int smoothed_terms = 0;
  double smoothing = kKlSmoothing;

  double mean_kl() const {
    double s = 0.0;
    for (const auto& x : samples) s += x.kl;
    return samples.empty() ? 0.0 : s / static_cast<double>(samples.size());
  }
  // max sqrt(2 KL): the measured kernel-mismatch radius.
  double delta() const {
    double m = 0.0;
    for (const auto& x : samples) m = std::max(m, std::sqrt(2.0 * x.kl));
    return m;
  }
};

// Draws (s, a) uniformly, s' ~ P(.|s,a), lets `reconstruct(s, a, s', rng)` pick
// a-hat and scores KL(P(.|s,a) || P(.|s,a-hat)) from the exact kernels.
template <class Reconstruct>
ReconstructionReport reconstruction_kl(const TabularLatentMdp& env, const ActionRegistry& registry, int n_samples,
                                       Reconstruct&& reconstruct, Rng& rng) {
  auto ids = registry.available_ids();
  if (ids.empty()) throw NoAvailableActions();
  ReconstructionReport rep;
  for (int i = 0; i < n_samples; ++i) {
    int s = rng.uniform_int(env.n_states());
    int a = ids[static_cast<size_t>(rng.uniform_int(static_cast<int>(ids.size())))];
    Vec p = env.kernel_row(s, registry.entry(a).latent);
    int s_next = rng.categorical(p);
    int a_hat = reconstruct(s, a, s_next, rng);
    Vec q = env.kernel_row(s, registry.entry(a_hat).latent);
    rep.samples.push_back({s, a, a_hat, smoothed_kl(p, q, &rep.smoothed_terms)});
  }
  return rep;
}

// The phi -> phi-hat pipeline: sample e ~ phi(.|s,s'), then a-hat ~ phi-hat(.|e).
inline auto learned_reconstruction(const ActionSelector& selector, const InverseDynamics& inverse,
                                   const Featurizer& featurizer, const TabularLatentMdp& env,
                                   const ActionRegistry& registry) {
  return [&selector, &inverse, &featurizer, &env, ids = registry.available_ids()](int s, int, int s_next, Rng& rng) {
    auto t = inverse.encode_transition(featurizer(env.state_of(s).obs), featurizer(env.state_of(s_next).obs), rng);
    return selector.select(t.e_sample, ids, rng).action_id;
  };
}

struct KlObjectiveReport {
  double value = 0.0;
  int smoothed_terms = 0;
  double smoothing = kKlSmoothing;
};

// Monte Carlo estimate of the average kernel KL between true and reconstructed actions.
inline KlObjectiveReport estimate_kl_objective(const ActionSelector& selector, const InverseDynamics& inverse,
                                               const Featurizer& featurizer, const TabularLatentMdp& env,
                                               const ActionRegistry& registry, int n_samples, Rng& rng) {
  auto rep = reconstruction_kl(env, registry, n_samples,
                               learned_reconstruction(selector, inverse, featurizer, env, registry), rng);
  return {rep.mean_kl(), rep.smoothed_terms, rep.smoothing};
}

}  // namespace laica
