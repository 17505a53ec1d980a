#pragma once

#include <filesystem>
#include <fstream>

#include "laica/approx/checkpoint.hpp"
#include "laica/policy/action_selector.hpp"
#include "laica/policy/critic.hpp"
#include "laica/policy/decision_policy.hpp"
#include "laica/policy/featurizer.hpp"
#include "laica/policy/inverse_dynamics.hpp"

namespace laica {

struct BundleConfig {
  DecisionPolicyConfig beta;
  InverseDynamicsConfig inverse;
  CriticConfig critic;
  double temperature = 1.0;
};

// Everything LAICA carries across changes.
struct PolicyBundle {
  Featurizer featurizer;
  DecisionPolicy beta;
  ActionSelector selector;
  InverseDynamics inverse;
  Critic critic;

  PolicyBundle() = default;
  PolicyBundle(Featurizer f, const BundleConfig& cfg, Rng& rng)
      : featurizer(std::move(f)),
        beta(featurizer.size(), cfg.beta, rng),
        selector(cfg.beta.latent_dim, cfg.temperature),
        inverse(featurizer.size(), cfg.beta.latent_dim, cfg.inverse, rng),
        critic(featurizer.size(), cfg.critic, rng) {}
};

// Directory checkpoint: one <name>.bin/.json pair per component plus manifest.json.
inline void save_bundle(const PolicyBundle& b, const std::filesystem::path& dir, int current_k) {
  std::filesystem::create_directories(dir);
  save_checkpoint(b.beta.mean_map(), dir / "beta_mean");
  save_checkpoint(b.inverse.encoder(), dir / "inverse_dynamics");
  save_checkpoint(b.critic.value_map(), dir / "critic");
  {
    std::ofstream bin(dir / "selector.bin", std::ios::binary);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = b.selector.weights();
    write_le_doubles(bin, Eigen::Map<const Vec>(rows.data(), rows.size()));
  }
  nlohmann::json manifest{{"latent_dim", b.beta.latent_dim()},
                          {"selector_rows", b.selector.rows()},
                          {"temperature", b.selector.temperature()},
                          {"beta_log_std", b.beta.log_std()},
                          {"beta_learns_log_std", b.beta.learns_log_std()},
                          {"current_k", current_k}};
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
}

// Restores parameters into a bundle of matching topology; returns current_k.
inline int load_bundle(PolicyBundle& b, const std::filesystem::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw DomainError("bundle checkpoint: missing manifest in " + dir.string());
  auto manifest = nlohmann::json::parse(mf);
  int d = manifest.at("latent_dim");
  int rows = manifest.at("selector_rows");
  b.beta.mean_map() = load_checkpoint(dir / "beta_mean");
  Vec p = b.beta.params();
  p[p.size() - 1] = manifest.at("beta_log_std").get<double>();
  b.beta.set_params(p);
  b.inverse.encoder() = load_checkpoint(dir / "inverse_dynamics");
  b.critic.value_map() = load_checkpoint(dir / "critic");
  b.critic.reset_trace();
  std::ifstream bin(dir / "selector.bin", std::ios::binary);
  Vec flat = read_le_doubles(bin, static_cast<Eigen::Index>(rows) * d);
  b.selector = ActionSelector(d, manifest.at("temperature").get<double>());
  b.selector.weights() = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), rows, d);
  return manifest.at("current_k");
}

}  // namespace laica
