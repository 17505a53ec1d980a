#pragma once

#include <span>
#include <vector>

#include "laica/env/tabular.hpp"

namespace laica {

struct ValueSolution {
  Vec values;
  std::vector<int> policy;  // index into the candidate latents, per state
  double residual = 0.0;
  int iterations = 0;
};

// Optimal values when the agent may pick any latent in `candidates`, with the
// reward collected in the current state: v(s) = r(s) + gamma max_e P(.|s,e) v.
// Iterates until the sup-norm Bellman residual is <= tolerance.
inline ValueSolution value_iteration(const TabularLatentMdp& env, std::span<const Vec> candidates,
                                     double tolerance = 1e-10, int max_iterations = 1000000) {
  if (candidates.empty()) throw NoAvailableActions();
  const int n = env.n_states();
  const auto& anchors = env.anchors();
  const Eigen::Index m = static_cast<Eigen::Index>(anchors.size());
  Mat weights(static_cast<Eigen::Index>(candidates.size()), m);
  for (size_t c = 0; c < candidates.size(); ++c)
    weights.row(static_cast<Eigen::Index>(c)) = env.weight_map().weights(candidates[c]).transpose();

  ValueSolution sol;
  sol.values = Vec::Zero(n);
  Mat anchor_values(n, m);
  Mat q;
  auto backup = [&](const Vec& v) {
    for (Eigen::Index k = 0; k < m; ++k) anchor_values.col(k) = anchors[static_cast<size_t>(k)] * v;
    q = (env.gamma() * (anchor_values * weights.transpose())).colwise() + env.reward();
    return Vec(q.rowwise().maxCoeff());
  };
  for (sol.iterations = 1; sol.iterations <= max_iterations; ++sol.iterations) {
    Vec next = backup(sol.values);
    sol.residual = (next - sol.values).cwiseAbs().maxCoeff();
    sol.values = std::move(next);
    if (sol.residual <= tolerance) break;
  }
  backup(sol.values);
  sol.policy.resize(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s) {
    Eigen::Index best;
    q.row(s).maxCoeff(&best);
    sol.policy[static_cast<size_t>(s)] = static_cast<int>(best);
  }
  return sol;
}

}  // namespace laica
