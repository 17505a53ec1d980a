#pragma once

#include <vector>

#include "laica/core/registry.hpp"

namespace laica {

// A state value carried between steps. `obs` is normalized to [0,1]^n and is
// what agents featurize; `index` is the discrete state for tabular MDPs and
// `history` the item window for the n-gram MDP.
struct EnvState {
  Vec obs;
  int index = -1;
  std::vector<int> history;
  int t = 0;
  bool terminal = false;
};

struct StepResult {
  EnvState next;
  double reward = 0.0;
  bool terminal = false;
};

struct BaseMdpInfo {
  int n_states = 0;          // > 0 for finite-state MDPs
  int observation_dim = 0;   // continuous observation size
  double gamma = 0.99;
  double r_max = 1.0;
  int horizon = 150;
};

// P(s'|s,e): environments are stepped with the hidden latent of the action, the
// discrete id never reaches them. Rewards depend on the next state only, and
// hitting the horizon counts as terminal.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual const BaseMdpInfo& info() const = 0;
  virtual int latent_dim() const = 0;
  virtual EnvState reset(Rng& rng) const = 0;
  virtual StepResult step(const EnvState& state, const Vec& latent, Rng& rng) const = 0;
};

// The step contract with the registry in the loop: unavailable ids are faults.
inline StepResult step_action(const Environment& env, const ActionRegistry& registry, const EnvState& state,
                              int action_id, Rng& rng) {
  if (!registry.is_available(action_id)) throw ActionUnavailable(action_id);
  if (state.terminal) throw DomainError("cannot step a terminal state");
  return env.step(state, registry.entry(action_id).latent, rng);
}

}  // namespace laica
