#pragma once

#include <concepts>
#include <span>

#include "laica/core/latent_space.hpp"

namespace laica {

// Anything exposing exact next-state distributions P(.|s,e).
template <class K>
concept ExactKernel = requires(const K& k, int s, const Vec& e) {
  { k.kernel_row(s, e) } -> std::convertible_to<Vec>;
  { k.n_states() } -> std::convertible_to<int>;
};

struct LatentPair {
  int state = 0;
  Vec first;
  Vec second;
};

// max ||P(.|s,e_i) - P(.|s,e_j)||_1 / ||e_i - e_j||_1 over the pairs; a lower bound
// on the true rho. Pairs with e_i == e_j are skipped.
template <ExactKernel K>
double lipschitz_estimate(const K& env, std::span<const LatentPair> pairs) {
  double best = 0.0;
  bool any = false;
  for (const auto& p : pairs) {
    double de = (p.first - p.second).lpNorm<1>();
    if (de == 0.0) continue;
    any = true;
    double dp = (env.kernel_row(p.state, p.first) - env.kernel_row(p.state, p.second)).template lpNorm<1>();
    best = std::max(best, dp / de);
  }
  if (!any) throw DomainError("lipschitz_estimate: every pair has identical latents");
  return best;
}

template <ExactKernel K>
std::vector<LatentPair> random_latent_pairs(const K& env, const LatentActionSpace& space, int n, Rng& rng) {
  std::vector<LatentPair> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    out.push_back({rng.uniform_int(env.n_states()), space.sample_uniform(rng), space.sample_uniform(rng)});
  return out;
}

}  // namespace laica
