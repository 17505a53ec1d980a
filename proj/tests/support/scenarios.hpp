#pragma once

// Scenarios shared by the unit and acceptance suites.

#include "laica/laica.hpp"

namespace laica::testing {

struct InjectiveAdaptationOutcome {
  AdaptationReport report;
  double heldout_accuracy_pre = 0.0;
  double heldout_accuracy_post = 0.0;
  double kl_objective_pre = 0.0;
  double kl_objective_post = 0.0;
  double delta_pre = 0.0;
  double delta_post = 0.0;
  Vec beta_before, beta_after;
};

// 5-state instance whose four corner actions each shift the state by a
// distinct amount; phi and phi-hat are trained on random rollouts and judged on
// a fresh set of transitions.
inline InjectiveAdaptationOutcome run_injective_adaptation(std::uint64_t seed, AdaptationConfig cfg = {}) {
  auto env = generate_injective_tabular(seed, 5, 2);
  ActionRegistry registry(env.latent_space());
  registry.add_change(cube_corners(2));
  Rng init = make_rng(seed, {static_cast<std::uint64_t>(Stream::init)});
  Rng adapt = make_rng(seed, {static_cast<std::uint64_t>(Stream::adaptation)});
  Rng eval = make_rng(seed, {static_cast<std::uint64_t>(Stream::probes)});
  Rng rows = make_rng(seed, {static_cast<std::uint64_t>(Stream::row_init)});
  BundleConfig bc;
  bc.beta.latent_dim = 2;
  PolicyBundle bundle(Featurizer::identity(5), bc, init);
  bundle.selector.stack_rows(registry.size(), rows);
  auto ids = registry.available_ids();

  InjectiveAdaptationOutcome out;
  auto heldout = collect_random_transitions(env, registry, 40, eval);
  auto held = heldout.strided(heldout.size());
  out.heldout_accuracy_pre = prediction_accuracy(bundle.selector, bundle.inverse, bundle.featurizer, held, ids);
  out.kl_objective_pre = estimate_kl_objective(bundle.selector, bundle.inverse, bundle.featurizer, env, registry, 4000, eval).value;
  out.delta_pre = measure_delta_k(bundle.selector, bundle.inverse, bundle.featurizer, env, registry, 1000, eval);
  out.beta_before = bundle.beta.params();
  out.report = run_adaptation(bundle, env, registry, cfg, adapt);
  out.beta_after = bundle.beta.params();
  out.heldout_accuracy_post = prediction_accuracy(bundle.selector, bundle.inverse, bundle.featurizer, held, ids);
  out.kl_objective_post = estimate_kl_objective(bundle.selector, bundle.inverse, bundle.featurizer, env, registry, 4000, eval).value;
  out.delta_post = measure_delta_k(bundle.selector, bundle.inverse, bundle.featurizer, env, registry, 1000, eval);
  return out;
}

}  // namespace laica::testing
