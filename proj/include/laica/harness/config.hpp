#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "laica/algorithms/lifelong.hpp"
#include "laica/env/maze.hpp"
#include "laica/env/ngram.hpp"
#include "laica/env/tabular.hpp"
#include "laica/harness/json_reader.hpp"

namespace laica {

struct NgramEnvConfig {
  std::uint64_t seed = 0;
  int n_items = 60;
  int n_value = 1;
  int feature_dim = 2;
  int horizon = 20;
  double gamma = 0.9;
};

struct TabularEnvConfig {
  std::uint64_t seed = 0;
  int n_states = 5;
  int latent_dim = 2;
  bool injective = true;
  double gamma = 0.9;
  int horizon = 50;
};

using EnvConfig = std::variant<MazeConfig, NgramEnvConfig, TabularEnvConfig>;

enum class ScheduleKind { split, uniform };

struct ScheduleConfig {
  ScheduleKind kind = ScheduleKind::split;
  int n_changes = 5;
  std::int64_t episodes_per_segment = 2000;
  int initial = 4;     // uniform schedules only
  int per_change = 4;  // uniform schedules only
};

struct ExperimentConfig {
  EnvConfig env = MazeConfig{};
  ScheduleConfig schedule;
  std::vector<Algorithm> algorithms{Algorithm::laica_ac, Algorithm::baseline1, Algorithm::baseline2};
  int n_seeds = 10;
  std::uint64_t master_seed = 0;
  std::string output_dir = "out";
  int running_mean_window = 100;
  int threads = 0;  // 0: available parallelism
  AgentConfig agent;
};

inline std::string env_type(const EnvConfig& e) {
  return std::holds_alternative<MazeConfig>(e) ? "maze" : std::holds_alternative<NgramEnvConfig>(e) ? "ngram" : "tabular";
}

inline std::vector<double> vec_to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

namespace detail {

inline Vec read_vec2(JsonReader& r, const std::string& key, const Vec& fallback) {
  auto v = r.get<std::vector<double>>(key, vec_to_std(fallback));
  if (v.size() != 2) throw ConfigError(r.field(key), "expected a 2-vector");
  return Eigen::Map<const Vec>(v.data(), 2);
}

inline EnvConfig parse_env(JsonReader r) {
  std::string type = r.get<std::string>("type", "maze");
  if (type == "maze") {
    MazeConfig m;
    m.step_scale = r.get("step_scale", m.step_scale);
    m.noise_prob = r.get("noise_prob", m.noise_prob);
    m.horizon = r.get("horizon", m.horizon);
    m.step_penalty = r.get("step_penalty", m.step_penalty);
    m.goal_reward = r.get("goal_reward", m.goal_reward);
    m.goal_center = read_vec2(r, "goal_center", m.goal_center);
    m.goal_radius = r.get("goal_radius", m.goal_radius);
    m.start = read_vec2(r, "start", m.start);
    m.gamma = r.get("gamma", m.gamma);
    for (const auto& w : r.get<std::vector<std::vector<double>>>("walls", {})) {
      if (w.size() != 4 || (w[0] != w[2] && w[1] != w[3])) throw ConfigError(r.field("walls"), "walls are axis-aligned [x0,y0,x1,y1]");
      m.walls.push_back({w[0], w[1], w[2], w[3]});
    }
    r.finish();
    try {
      m.validate();
    } catch (const DomainError& e) {
      throw ConfigError("env", e.what());
    }
    return m;
  }
  if (type == "ngram") {
    NgramEnvConfig n;
    n.seed = r.get("seed", n.seed);
    n.n_items = r.get("n_items", n.n_items);
    n.n_value = r.get("n_value", n.n_value);
    n.feature_dim = r.get("feature_dim", n.feature_dim);
    n.horizon = r.get("horizon", n.horizon);
    n.gamma = r.get("gamma", n.gamma);
    r.finish();
    if (n.n_items < 10) throw ConfigError("env.n_items", "must be >= 10");
    if (n.n_value < 1 || n.feature_dim < 1 || n.horizon < 1) throw ConfigError("env", "n_value, feature_dim, horizon must be positive");
    if (!(n.gamma >= 0 && n.gamma < 1)) throw ConfigError("env.gamma", "must lie in [0,1)");
    return n;
  }
  if (type == "tabular") {
    TabularEnvConfig t;
    t.seed = r.get("seed", t.seed);
    t.n_states = r.get("n_states", t.n_states);
    t.latent_dim = r.get("latent_dim", t.latent_dim);
    t.injective = r.get("injective", t.injective);
    t.gamma = r.get("gamma", t.gamma);
    t.horizon = r.get("horizon", t.horizon);
    r.finish();
    if (t.n_states < 2) throw ConfigError("env.n_states", "must be >= 2");
    if (t.latent_dim < 1 || t.latent_dim > 4) throw ConfigError("env.latent_dim", "must lie in [1,4]");
    if (t.injective && (1 << t.latent_dim) > t.n_states) throw ConfigError("env.latent_dim", "injective needs 2^latent_dim <= n_states");
    if (!(t.gamma >= 0 && t.gamma < 1)) throw ConfigError("env.gamma", "must lie in [0,1)");
    return t;
  }
  throw ConfigError(r.field("type"), "unknown environment type '" + type + "'");
}

inline std::vector<int> read_widths(JsonReader& r, const std::string& key, std::vector<int> fallback) {
  auto v = r.get<std::vector<int>>(key, std::move(fallback));
  for (int w : v)
    if (w < 1) throw ConfigError(r.field(key), "layer widths must be positive");
  return v;
}

inline void positive(double v, const std::string& field) {
  if (!(v > 0)) throw ConfigError(field, "must be positive");
}

}  // namespace detail

// Parses and validates an experiment config; environment-dependent defaults
// (latent dimension, featurizer, log-std learning, rollout count) are filled here.
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  using namespace detail;
  JsonReader root(j, "");
  ExperimentConfig c;
  c.env = parse_env(root.child("env"));
  const std::string type = env_type(c.env);

  {
    auto s = root.child("schedule");
    std::string kind = s.get<std::string>("kind", type == "tabular" ? "uniform" : "split");
    if (kind != "split" && kind != "uniform") throw ConfigError("schedule.kind", "expected 'split' or 'uniform'");
    c.schedule.kind = kind == "split" ? ScheduleKind::split : ScheduleKind::uniform;
    c.schedule.n_changes = s.get("n_changes", c.schedule.n_changes);
    c.schedule.episodes_per_segment = s.get("episodes_per_segment", c.schedule.episodes_per_segment);
    c.schedule.initial = s.get("initial", c.schedule.initial);
    c.schedule.per_change = s.get("per_change", c.schedule.per_change);
    s.finish();
    if (c.schedule.n_changes < 1) throw ConfigError("schedule.n_changes", "must be >= 1");
    if (c.schedule.episodes_per_segment < 1) throw ConfigError("schedule.episodes_per_segment", "must be >= 1");
    if (c.schedule.initial < 1 || c.schedule.per_change < 1) throw ConfigError("schedule", "initial and per_change must be >= 1");
  }

  if (root.has("algorithms")) {
    c.algorithms.clear();
    for (const auto& name : root.get<std::vector<std::string>>("algorithms", {})) {
      auto a = algorithm_from_string(name);
      if (!a) throw ConfigError("algorithms", "unknown algorithm '" + name + "'");
      c.algorithms.push_back(*a);
    }
    if (c.algorithms.empty()) throw ConfigError("algorithms", "need at least one algorithm");
  } else {
    root.get<std::vector<std::string>>("algorithms", {});
  }
  c.n_seeds = root.get("n_seeds", c.n_seeds);
  c.master_seed = root.get("master_seed", c.master_seed);
  c.output_dir = root.get("output_dir", c.output_dir);
  c.running_mean_window = root.get("running_mean_window", c.running_mean_window);
  c.threads = root.get("threads", c.threads);
  if (c.n_seeds < 1) throw ConfigError("n_seeds", "must be >= 1");
  if (c.running_mean_window < 1) throw ConfigError("running_mean_window", "must be >= 1");
  if (c.threads < 0) throw ConfigError("threads", "must be >= 0");

  double env_gamma = std::visit([](const auto& e) { return e.gamma; }, c.env);
  auto a = root.child("agent");
  AgentConfig& ag = c.agent;
  {
    auto f = a.child("features");
    std::string kind = f.get<std::string>("kind", type == "tabular" ? "identity" : "fourier");
    if (kind != "fourier" && kind != "identity") throw ConfigError("agent.features.kind", "expected 'fourier' or 'identity'");
    ag.features.kind = kind == "fourier" ? FeatureKind::fourier : FeatureKind::identity;
    ag.features.order = f.get("order", 3);
    f.finish();
    if (ag.features.order < 0 || ag.features.order > 8) throw ConfigError("agent.features.order", "must lie in [0,8]");
  }
  double gamma = a.get("gamma", env_gamma);
  double trace_decay = a.get("trace_decay", 0.9);
  if (!(gamma >= 0 && gamma < 1)) throw ConfigError("agent.gamma", "must lie in [0,1)");
  if (!(trace_decay >= 0 && trace_decay <= 1)) throw ConfigError("agent.trace_decay", "must lie in [0,1]");
  {
    auto l = a.child("laica");
    auto& b = ag.bundle;
    b.beta.latent_dim = l.get("latent_dim", type == "ngram" ? 16 : 2);
    b.beta.hidden = read_widths(l, "beta_hidden", {});
    double beta_std = l.get("beta_std", 1.0);
    positive(beta_std, "agent.laica.beta_std");
    b.beta.log_std = std::log(beta_std);
    b.beta.learn_log_std = l.get("learn_std", type != "maze");
    b.inverse.hidden = read_widths(l, "encoder_hidden", {64});
    b.temperature = l.get("temperature", 1.0);
    ag.improvement = {gamma, trace_decay, l.get("lr_actor", 1e-3), l.get("lr_critic", 5e-3)};
    l.finish();
    if (b.beta.latent_dim < 1) throw ConfigError("agent.laica.latent_dim", "must be >= 1");
    positive(b.temperature, "agent.laica.temperature");
    if (ag.improvement.lr_actor < 0 || ag.improvement.lr_critic < 0) throw ConfigError("agent.laica", "learning rates must be >= 0");
  }
  {
    auto ad = a.child("adaptation");
    auto& x = ag.adaptation;
    x.lambda = ad.get("lambda", 1.0);
    x.iterations = ad.get("iterations", 2000);
    x.batch_size = ad.get("batch_size", 64);
    x.lr = ad.get("lr", 1e-3);
    x.trajectories = ad.get("trajectories", type == "ngram" ? 2000 : 500);
    ag.count_adaptation_episodes = ad.get("count_episodes", false);
    ad.finish();
    if (x.lambda < 0) throw ConfigError("agent.adaptation.lambda", "must be >= 0");
    if (x.iterations < 0) throw ConfigError("agent.adaptation.iterations", "must be >= 0");
    if (x.batch_size < 1) throw ConfigError("agent.adaptation.batch_size", "must be >= 1");
    if (x.trajectories < 1) throw ConfigError("agent.adaptation.trajectories", "must be >= 1");
    positive(x.lr, "agent.adaptation.lr");
  }
  {
    auto cr = a.child("critic");
    ag.bundle.critic.hidden = read_widths(cr, "hidden", {});
    cr.finish();
  }
  {
    auto d = a.child("direct");
    ag.direct.hidden = read_widths(d, "hidden", {64});
    ag.direct_improvement = {gamma, trace_decay, d.get("lr_actor", 1e-3), d.get("lr_critic", 5e-3)};
    d.finish();
    if (ag.direct_improvement.lr_actor < 0 || ag.direct_improvement.lr_critic < 0) throw ConfigError("agent.direct", "learning rates must be >= 0");
  }
  a.finish();
  root.finish();
  return c;
}

// Fully resolved config, re-parseable by parse_experiment_config.
inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json env;
  if (const auto* m = std::get_if<MazeConfig>(&c.env)) {
    nlohmann::json walls = nlohmann::json::array();
    for (const auto& w : m->walls) walls.push_back({w.x0, w.y0, w.x1, w.y1});
    env = {{"type", "maze"},          {"step_scale", m->step_scale},   {"noise_prob", m->noise_prob},
           {"horizon", m->horizon},   {"step_penalty", m->step_penalty}, {"goal_reward", m->goal_reward},
           {"goal_center", vec_to_std(m->goal_center)}, {"goal_radius", m->goal_radius},
           {"start", vec_to_std(m->start)}, {"gamma", m->gamma}, {"walls", walls}};
  } else if (const auto* n = std::get_if<NgramEnvConfig>(&c.env)) {
    env = {{"type", "ngram"},      {"seed", n->seed},       {"n_items", n->n_items}, {"n_value", n->n_value},
           {"feature_dim", n->feature_dim}, {"horizon", n->horizon}, {"gamma", n->gamma}};
  } else {
    const auto& t = std::get<TabularEnvConfig>(c.env);
    env = {{"type", "tabular"},  {"seed", t.seed},   {"n_states", t.n_states}, {"latent_dim", t.latent_dim},
           {"injective", t.injective}, {"gamma", t.gamma}, {"horizon", t.horizon}};
  }
  std::vector<std::string> algs;
  for (auto a : c.algorithms) algs.push_back(to_string(a));
  const auto& ag = c.agent;
  return {
      {"env", env},
      {"schedule",
       {{"kind", c.schedule.kind == ScheduleKind::split ? "split" : "uniform"},
        {"n_changes", c.schedule.n_changes},
        {"episodes_per_segment", c.schedule.episodes_per_segment},
        {"initial", c.schedule.initial},
        {"per_change", c.schedule.per_change}}},
      {"algorithms", algs},
      {"n_seeds", c.n_seeds},
      {"master_seed", c.master_seed},
      {"output_dir", c.output_dir},
      {"running_mean_window", c.running_mean_window},
      {"threads", c.threads},
      {"agent",
       {{"features",
         {{"kind", ag.features.kind == FeatureKind::fourier ? "fourier" : "identity"}, {"order", ag.features.order}}},
        {"gamma", ag.improvement.gamma},
        {"trace_decay", ag.improvement.trace_decay},
        {"laica",
         {{"latent_dim", ag.bundle.beta.latent_dim},
          {"beta_hidden", ag.bundle.beta.hidden},
          {"beta_std", std::exp(ag.bundle.beta.log_std)},
          {"learn_std", ag.bundle.beta.learn_log_std},
          {"encoder_hidden", ag.bundle.inverse.hidden},
          {"temperature", ag.bundle.temperature},
          {"lr_actor", ag.improvement.lr_actor},
          {"lr_critic", ag.improvement.lr_critic}}},
        {"adaptation",
         {{"lambda", ag.adaptation.lambda},
          {"iterations", ag.adaptation.iterations},
          {"batch_size", ag.adaptation.batch_size},
          {"lr", ag.adaptation.lr},
          {"trajectories", ag.adaptation.trajectories},
          {"count_episodes", ag.count_adaptation_episodes}}},
        {"critic", {{"hidden", ag.bundle.critic.hidden}}},
        {"direct",
         {{"hidden", ag.direct.hidden},
          {"lr_actor", ag.direct_improvement.lr_actor},
          {"lr_critic", ag.direct_improvement.lr_critic}}}}}};
}

// Environment instance and action pool described by a config.
struct EnvironmentBundle {
  std::shared_ptr<const Environment> env;
  LatentActionSpace space;
  std::vector<Vec> action_pool;  // split schedules partition this pool
  const TabularLatentMdp* tabular = nullptr;
};

inline EnvironmentBundle build_environment(const EnvConfig& cfg) {
  EnvironmentBundle out;
  if (const auto* m = std::get_if<MazeConfig>(&cfg)) {
    out.env = std::make_shared<MazeEnv>(*m);
    out.space = maze_latent_space(m->step_scale);
    out.action_pool = maze_action_latents(m->step_scale);
  } else if (const auto* n = std::get_if<NgramEnvConfig>(&cfg)) {
    auto env = std::make_shared<NgramEnv>(
        [&] {
          auto s = generate_ngram(n->seed, n->n_items, n->n_value, n->feature_dim);
          s.horizon = n->horizon;
          s.gamma = n->gamma;
          return s;
        }());
    out.space = env->latent_space();
    out.action_pool = env->item_latents();
    out.env = env;
  } else {
    const auto& t = std::get<TabularEnvConfig>(cfg);
    TabularOptions opt;
    opt.gamma = t.gamma;
    opt.horizon = t.horizon;
    opt.kind = WeightMapKind::multilinear;
    auto env = std::make_shared<TabularLatentMdp>(t.injective ? generate_injective_tabular(t.seed, t.n_states, t.latent_dim, opt)
                                                              : generate_tabular(t.seed, t.n_states, 1 << t.latent_dim,
                                                                                 t.latent_dim, opt));
    out.space = env->latent_space();
    out.action_pool = cube_corners(t.latent_dim);
    out.tabular = env.get();
    out.env = env;
  }
  return out;
}

inline ChangeSchedule build_schedule(const ScheduleConfig& cfg, const EnvironmentBundle& env, Rng& rng) {
  if (cfg.kind == ScheduleKind::split) {
    if (static_cast<int>(env.action_pool.size()) < cfg.n_changes)
      throw ConfigError("schedule.n_changes", "more changes than actions in the pool");
    return split_schedule(env.action_pool, cfg.n_changes, cfg.episodes_per_segment, rng);
  }
  std::vector<std::int64_t> eps;
  std::vector<int> counts;
  for (int k = 0; k < cfg.n_changes; ++k) {
    eps.push_back(k * cfg.episodes_per_segment);
    counts.push_back(k == 0 ? cfg.initial : cfg.per_change);
  }
  return uniform_schedule(env.space, eps, counts, rng);
}

}  // namespace laica
