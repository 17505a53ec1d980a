#pragma once

#include "laica/algorithms/direct_policy.hpp"
#include "laica/core/environment.hpp"
#include "laica/policy/bundle.hpp"

namespace laica {

struct ImprovementConfig {
  double gamma = 0.99;
  double trace_decay = 0.9;
  double lr_actor = 1e-3;
  double lr_critic = 5e-3;
};

struct EpisodeResult {
  double episode_return = 0.0;
  int steps = 0;
};

// One on-policy actor-critic episode for LAICA: e-hat ~ beta(s), a ~ phi-hat(e-hat)
// with phi-hat frozen, TD(lambda) critic, and a traced likelihood-ratio update of beta.
// `env_rng` drives resets and transitions, `rng` the policy's own draws.
inline EpisodeResult improve_episode_laica(PolicyBundle& b, const Environment& env, const ActionRegistry& registry,
                                           const ImprovementConfig& cfg, Rng& rng, Rng& env_rng) {
  auto ids = registry.available_ids();
  b.critic.reset_trace();
  Vec beta_trace = Vec::Zero(b.beta.parameter_count());
  EpisodeResult out;
  EnvState s = env.reset(env_rng);
  Vec f = b.featurizer(s.obs);
  while (!s.terminal) {
    auto latent = b.beta.sample(f, rng);
    int a = b.selector.select(latent.e_hat, ids, rng).action_id;
    auto step = step_action(env, registry, s, a, env_rng);
    Vec f_next = b.featurizer(step.next.obs);
    double delta = b.critic.update(f, step.reward, f_next, step.terminal, cfg.gamma, cfg.trace_decay, cfg.lr_critic);
    beta_trace = cfg.gamma * cfg.trace_decay * beta_trace + b.beta.score(f, latent.e_hat);
    if (cfg.lr_actor != 0.0) {
      Vec p = b.beta.params() + cfg.lr_actor * delta * beta_trace;
      if (!p.allFinite()) throw Divergence("decision policy parameters diverged");
      b.beta.set_params(p);
    }
    out.episode_return += step.reward;
    ++out.steps;
    s = std::move(step.next);
    f = std::move(f_next);
  }
  return out;
}

// One actor-critic episode for a direct softmax policy over the available ids.
inline EpisodeResult improve_episode_direct(DirectPolicy& policy, Critic& critic, const Featurizer& featurizer,
                                            const Environment& env, const ActionRegistry& registry,
                                            const ImprovementConfig& cfg, Rng& rng, Rng& env_rng) {
  auto ids = registry.available_ids();
  critic.reset_trace();
  DirectPolicy::Gradient trace{Vec::Zero(policy.has_trunk() ? policy.trunk().size() : 0),
                               Mat::Zero(policy.rows(), policy.head_dim()), Vec::Zero(policy.rows())};
  DirectPolicy::Gradient g;
  const double decay = cfg.gamma * cfg.trace_decay;
  EpisodeResult out;
  EnvState s = env.reset(env_rng);
  Vec f = featurizer(s.obs);
  while (!s.terminal) {
    Vec p = policy.probabilities(f, ids);
    int a = ids[static_cast<size_t>(rng.categorical(p))];
    auto step = step_action(env, registry, s, a, env_rng);
    Vec f_next = featurizer(step.next.obs);
    double delta = critic.update(f, step.reward, f_next, step.terminal, cfg.gamma, cfg.trace_decay, cfg.lr_critic);
    policy.log_prob_gradient(f, ids, a, g);
    trace.trunk = decay * trace.trunk + g.trunk;
    trace.logit_w = decay * trace.logit_w + g.logit_w;
    trace.logit_b = decay * trace.logit_b + g.logit_b;
    if (cfg.lr_actor != 0.0) {
      policy.add_scaled(trace, cfg.lr_actor * delta);
      if (!policy.all_finite()) throw Divergence("direct policy parameters diverged");
    }
    out.episode_return += step.reward;
    ++out.steps;
    s = std::move(step.next);
    f = std::move(f_next);
  }
  return out;
}

inline EpisodeResult improve_episode_laica(PolicyBundle& b, const Environment& env, const ActionRegistry& registry,
                                           const ImprovementConfig& cfg, Rng& rng) {
  return improve_episode_laica(b, env, registry, cfg, rng, rng);
}

inline EpisodeResult improve_episode_direct(DirectPolicy& policy, Critic& critic, const Featurizer& featurizer,
                                            const Environment& env, const ActionRegistry& registry,
                                            const ImprovementConfig& cfg, Rng& rng) {
  return improve_episode_direct(policy, critic, featurizer, env, registry, cfg, rng, rng);
}

}  // namespace laica
