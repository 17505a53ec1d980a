#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "laica/adapt/lower_bound.hpp"
#include "laica/approx/optimizer.hpp"
#include "laica/core/environment.hpp"
#include "laica/policy/bundle.hpp"

namespace laica {

struct AdaptationConfig {
  double lambda = 1.0;
  int iterations = 2000;
  int batch_size = 64;
  double lr = 1e-3;
  int trajectories = 500;
  size_t eval_samples = 4096;  // records used for the pre/post evaluation pass
};

struct AdaptationReport {
  double pre_objective = 0.0;
  double post_objective = 0.0;
  double pre_accuracy = 0.0;
  double post_accuracy = 0.0;
  double post_kl = 0.0;
  size_t buffer_size = 0;
  int iterations = 0;
};

inline nlohmann::json to_json(const AdaptationReport& r) {
  return {{"pre_objective", r.pre_objective}, {"post_objective", r.post_objective},
          {"pre_accuracy", r.pre_accuracy},   {"post_accuracy", r.post_accuracy},
          {"post_kl", r.post_kl},             {"buffer_size", r.buffer_size},
          {"iterations", r.iterations}};
}

// Random-policy rollouts over the currently available actions.
inline TransitionBuffer collect_random_transitions(const Environment& env, const ActionRegistry& registry,
                                                   int trajectories, Rng& rng,
                                                   std::vector<double>* returns = nullptr) {
  TransitionBuffer buffer;
  auto ids = registry.available_ids();
  if (ids.empty()) throw NoAvailableActions();
  for (int traj = 0; traj < trajectories; ++traj) {
    EnvState s = env.reset(rng);
    double ret = 0.0;
    while (!s.terminal) {
      int a = ids[static_cast<size_t>(rng.uniform_int(static_cast<int>(ids.size())))];
      auto step = step_action(env, registry, s, a, rng);
      buffer.push({s.obs, a, step.next.obs});
      ret += step.reward;
      s = std::move(step.next);
    }
    if (returns) returns->push_back(ret);
  }
  return buffer;
}

// Ascends the lower bound over (phi-hat, phi) on a fixed buffer; beta and the
// critic are not touched.
inline AdaptationReport optimize_lower_bound(ActionSelector& selector, InverseDynamics& inverse,
                                             const Featurizer& featurizer, const TransitionBuffer& buffer,
                                             std::span<const int> available, const AdaptationConfig& cfg, Rng& rng) {
  AdaptationReport report;
  report.buffer_size = buffer.size();
  report.iterations = cfg.iterations;
  if (buffer.empty()) return report;

  auto eval_set = buffer.strided(cfg.eval_samples);
  std::vector<Vec> eval_noise;
  for (size_t i = 0; i < eval_set.size(); ++i) eval_noise.push_back(rng.normal_vec(inverse.latent_dim()));
  auto evaluate = [&](double& objective, double& accuracy, double* kl) {
    auto r = lower_bound_batch(selector, inverse, featurizer, eval_set, available, cfg.lambda, eval_noise);
    objective = r.objective;
    if (kl) *kl = r.kl;
    accuracy = prediction_accuracy(selector, inverse, featurizer, eval_set, available);
  };
  evaluate(report.pre_objective, report.pre_accuracy, nullptr);

  if (cfg.iterations > 0) {
    const Eigen::Index n_sel = selector.weights().size();
    Vec params(n_sel + inverse.encoder().size());
    Optimizer opt(OptimizerConfig{OptimizerKind::adam, cfg.lr});
    for (int it = 0; it < cfg.iterations; ++it) {
      auto batch = buffer.sample(static_cast<size_t>(cfg.batch_size), rng);
      auto r = lower_bound_batch(selector, inverse, featurizer, batch, available, cfg.lambda, rng);
      if (!std::isfinite(r.objective)) throw Divergence("adaptation objective is not finite");
      params << Eigen::Map<const Vec>(selector.weights().data(), n_sel), inverse.encoder().params();
      Vec grad(params.size());
      grad << Eigen::Map<const Vec>(r.selector_grad.data(), n_sel), r.encoder_grad;
      opt.ascend(params, grad);
      Eigen::Map<Vec>(selector.weights().data(), n_sel) = params.head(n_sel);
      inverse.encoder().params() = params.tail(inverse.encoder().size());
    }
  }
  evaluate(report.post_objective, report.post_accuracy, &report.post_kl);
  return report;
}

inline AdaptationReport run_adaptation(PolicyBundle& bundle, const Environment& env, const ActionRegistry& registry,
                                       const AdaptationConfig& cfg, Rng& rng) {
  auto buffer = collect_random_transitions(env, registry, cfg.trajectories, rng);
  auto ids = registry.available_ids();
  return optimize_lower_bound(bundle.selector, bundle.inverse, bundle.featurizer, buffer, ids, cfg, rng);
}

}  // namespace laica
