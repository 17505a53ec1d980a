#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "laica/adapt/adaptation.hpp"
#include "laica/algorithms/improve.hpp"
#include "laica/core/schedule.hpp"

namespace laica {

enum class Algorithm { laica_ac, baseline1, baseline2 };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::laica_ac: return "laica_ac";
    case Algorithm::baseline1: return "baseline1";
    case Algorithm::baseline2: return "baseline2";
  }
  return "?";
}

inline std::optional<Algorithm> algorithm_from_string(const std::string& s) {
  if (s == "laica_ac") return Algorithm::laica_ac;
  if (s == "baseline1") return Algorithm::baseline1;
  if (s == "baseline2") return Algorithm::baseline2;
  return std::nullopt;
}

struct FeatureConfig {
  FeatureKind kind = FeatureKind::fourier;
  int order = 3;
};

struct AgentConfig {
  FeatureConfig features;
  BundleConfig bundle;
  AdaptationConfig adaptation;
  ImprovementConfig improvement;         // LAICA
  DirectPolicyConfig direct;
  ImprovementConfig direct_improvement;  // baselines
  // When set, adaptation rollouts consume the segment's episode budget and
  // their returns appear in the curve.
  bool count_adaptation_episodes = false;
};

inline Featurizer make_featurizer(const FeatureConfig& cfg, int observation_dim) {
  return cfg.kind == FeatureKind::fourier ? Featurizer::fourier(cfg.order, observation_dim)
                                          : Featurizer::identity(observation_dim);
}

struct TrialRecord {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<double> returns;
  std::vector<std::int64_t> change_episodes;
  nlohmann::json diagnostics = nlohmann::json::array();
  std::optional<std::string> fault;
};

inline nlohmann::json to_json(const TrialRecord& r) {
  nlohmann::json j{{"algorithm", r.algorithm},
                   {"seed", r.seed},
                   {"returns", r.returns},
                   {"change_episodes", r.change_episodes},
                   {"diagnostics", r.diagnostics}};
  j["fault"] = r.fault ? nlohmann::json(*r.fault) : nlohmann::json(nullptr);
  return j;
}

inline TrialRecord trial_from_json(const nlohmann::json& j) {
  TrialRecord r;
  r.algorithm = j.at("algorithm");
  r.seed = j.at("seed");
  r.returns = j.at("returns").get<std::vector<double>>();
  r.change_episodes = j.at("change_episodes").get<std::vector<std::int64_t>>();
  r.diagnostics = j.at("diagnostics");
  if (j.contains("fault") && !j["fault"].is_null()) r.fault = j["fault"].get<std::string>();
  return r;
}

enum class LifelongPhase { before_change, after_change, after_adaptation, after_episode };

// Read-only view handed to an optional observer at each phase boundary.
struct LifelongEvent {
  LifelongPhase phase;
  int k = 0;
  std::int64_t episode = 0;
  const ActionRegistry* registry = nullptr;
  const PolicyBundle* bundle = nullptr;   // LAICA only
  const DirectPolicy* direct = nullptr;   // baselines only
  const Critic* critic = nullptr;
};
using LifelongObserver = std::function<void(const LifelongEvent&)>;

struct LifelongSetup {
  const Environment* env = nullptr;
  LatentActionSpace space;
  ChangeSchedule schedule;
  std::int64_t episodes_per_segment = 2000;
};

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// One seeded lifelong run. Schedule and environment noise depend only on the
// trial seed, so every algorithm sees the same realization.
inline TrialRecord run_lifelong(const LifelongSetup& setup, Algorithm algorithm, const AgentConfig& cfg,
                                std::uint64_t trial_seed, const LifelongObserver& observe = {}) {
  const Environment& env = *setup.env;
  const auto& schedule = setup.schedule;
  TrialRecord rec;
  rec.algorithm = to_string(algorithm);
  rec.seed = trial_seed;
  rec.change_episodes = schedule.change_episodes;
  if (schedule.change_episodes.empty() || schedule.change_episodes.front() != 0) {
    rec.fault = "schedule must open with a change at episode 0";
    return rec;
  }
  const std::int64_t total = schedule.change_episodes.back() + setup.episodes_per_segment;

  Rng init_rng = make_rng(trial_seed, {static_cast<std::uint64_t>(Stream::init)});
  Rng adapt_rng = make_rng(trial_seed, {static_cast<std::uint64_t>(Stream::adaptation)});
  Rng act_rng = make_rng(trial_seed, {static_cast<std::uint64_t>(Stream::improvement)});
  Rng row_rng = make_rng(trial_seed, {static_cast<std::uint64_t>(Stream::row_init)});
  Rng env_rng = make_rng(trial_seed, {static_cast<std::uint64_t>(Stream::environment)});

  Featurizer featurizer = make_featurizer(cfg.features, env.info().observation_dim);
  ActionRegistry registry(setup.space);
  PolicyBundle bundle;
  DirectPolicy direct;
  Critic direct_critic;
  if (algorithm == Algorithm::laica_ac) {
    bundle = PolicyBundle(featurizer, cfg.bundle, init_rng);
  } else {
    direct = DirectPolicy(featurizer.size(), cfg.direct, init_rng);
    direct_critic = Critic(featurizer.size(), cfg.bundle.critic, init_rng);
  }

  auto emit = [&](LifelongPhase phase, std::int64_t episode) {
    if (!observe) return;
    LifelongEvent ev{phase, registry.current_k(), episode, &registry, nullptr, nullptr, nullptr};
    if (algorithm == Algorithm::laica_ac) {
      ev.bundle = &bundle;
      ev.critic = &bundle.critic;
    } else {
      ev.direct = &direct;
      ev.critic = &direct_critic;
    }
    observe(ev);
  };

  try {
    std::vector<double> charged;  // adaptation rollout returns charged to this segment
    size_t charged_at = 0;
    for (std::int64_t ep = 0; ep < total; ++ep) {
      if (schedule.change_index_at(ep) >= 0) {
        emit(LifelongPhase::before_change, ep);
        int added = apply_change(registry, schedule, ep);
        nlohmann::json diag{{"k", registry.current_k()}, {"episode", ep}, {"n_available", registry.size()},
                            {"added", added}};
        switch (algorithm) {
          case Algorithm::laica_ac: {
            bundle.selector.stack_rows(added, row_rng);
            emit(LifelongPhase::after_change, ep);
            std::vector<double> rollout_returns;
            auto buffer =
                collect_random_transitions(env, registry, cfg.adaptation.trajectories, adapt_rng, &rollout_returns);
            auto ids = registry.available_ids();
            auto report = optimize_lower_bound(bundle.selector, bundle.inverse, bundle.featurizer, buffer, ids,
                                               cfg.adaptation, adapt_rng);
            diag["adaptation"] = to_json(report);
            diag["beta_params"] = bundle.beta.parameter_count();
            diag["selector_rows"] = bundle.selector.rows();
            diag["adaptation_mean_return"] = mean_of(rollout_returns);
            if (cfg.count_adaptation_episodes) {
              charged = std::move(rollout_returns);
              charged_at = 0;
            }
            break;
          }
          case Algorithm::baseline1: {
            Rng re = make_rng(trial_seed, {static_cast<std::uint64_t>(Stream::reinit),
                                           static_cast<std::uint64_t>(registry.current_k())});
            direct = DirectPolicy(featurizer.size(), cfg.direct, re);
            direct.stack_rows(registry.size(), re);
            direct_critic = Critic(featurizer.size(), cfg.bundle.critic, re);
            diag["logit_rows"] = direct.rows();
            emit(LifelongPhase::after_change, ep);
            break;
          }
          case Algorithm::baseline2: {
            direct.stack_rows(added, row_rng);
            diag["logit_rows"] = direct.rows();
            emit(LifelongPhase::after_change, ep);
            break;
          }
        }
        rec.diagnostics.push_back(std::move(diag));
        emit(LifelongPhase::after_adaptation, ep);
      }
      if (charged_at < charged.size()) {
        rec.returns.push_back(charged[charged_at++]);
        continue;
      }
      EpisodeResult r;
      if (algorithm == Algorithm::laica_ac)
        r = improve_episode_laica(bundle, env, registry, cfg.improvement, act_rng, env_rng);
      else
        r = improve_episode_direct(direct, direct_critic, featurizer, env, registry, cfg.direct_improvement, act_rng,
                                   env_rng);
      rec.returns.push_back(r.episode_return);
      emit(LifelongPhase::after_episode, ep);
    }
  } catch (const LaicaError& e) {
    rec.fault = e.what();
  }
  return rec;
}

}  // namespace laica
