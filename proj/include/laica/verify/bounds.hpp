#pragma once

#include <cmath>
#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>

#include "laica/adapt/kl_objective.hpp"
#include "laica/core/covering.hpp"
#include "laica/core/schedule.hpp"
#include "laica/verify/value_iteration.hpp"

namespace laica {

// gamma rho eps R_max / (1 - gamma)^2
inline double suboptimality_bound(double gamma, double rho, double epsilon, double r_max) {
  return gamma * rho * epsilon * r_max / ((1.0 - gamma) * (1.0 - gamma));
}

struct BoundRow {
  int instance = 0;
  int k = 0;
  int n_available = 0;
  double epsilon = 0.0;
  double gap = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool holds = false;
};

struct BoundReport {
  std::vector<BoundRow> rows;
  double delta_k_hat = std::nan("");
  double discretization_epsilon = 0.0;
};

struct CertifyOptions {
  int grid_per_dim = 64;
  double tolerance = 1e-10;
};

// Replays the schedule change by change and checks
//   v*(d0) - v_k(d0) <= gamma rho eps_k R_max / (1-gamma)^2 + slack
// where v* optimizes over a dense grid of E and eps_k is the covering radius
// of the available latents over that same grid. The slack adds the bound for
// the grid's own covering radius of E (distance to the continuum optimum)
// plus the solver's error.
inline BoundReport certify_theorem1(const TabularLatentMdp& env, const ChangeSchedule& schedule,
                                    const CertifyOptions& opt = {}, int instance = 0) {
  auto space = env.latent_space();
  auto grid = grid_points(space, opt.grid_per_dim);
  const double gamma = env.gamma(), rho = env.rho(), r_max = env.r_max();
  const Vec& d0 = env.initial_distribution();

  BoundReport rep;
  for (const auto& b : space.bounds) rep.discretization_epsilon += b.width() / (2.0 * (opt.grid_per_dim - 1));
  const double solver_slack = 2.0 * opt.tolerance / (1.0 - gamma);
  const double slack = suboptimality_bound(gamma, rho, rep.discretization_epsilon, r_max) + solver_slack;

  double v_all = d0.dot(value_iteration(env, grid, opt.tolerance).values);
  ActionRegistry registry(space);
  for (int c = 0; c < schedule.n_changes(); ++c) {
    registry.add_change(schedule.additions[static_cast<size_t>(c)]);
    auto latents = registry.available_latents();
    BoundRow row;
    row.instance = instance;
    row.k = registry.current_k();
    row.n_available = registry.size();
    row.epsilon = covering_radius(latents, grid).epsilon;
    row.gap = v_all - d0.dot(value_iteration(env, latents, opt.tolerance).values);
    row.bound = suboptimality_bound(gamma, rho, row.epsilon, r_max);
    row.slack = slack;
    row.holds = row.gap <= row.bound + row.slack && row.gap >= -solver_slack;
    rep.rows.push_back(row);
  }
  return rep;
}

struct TrendReport {
  std::vector<double> epsilon;
  std::vector<double> gap;
  bool epsilon_nonincreasing = true;
};

inline TrendReport certify_corollary1(const TabularLatentMdp& env, const ChangeSchedule& schedule,
                                      const CertifyOptions& opt = {}) {
  auto rep = certify_theorem1(env, schedule, opt);
  TrendReport t;
  for (const auto& r : rep.rows) {
    if (!t.epsilon.empty() && r.epsilon > t.epsilon.back()) t.epsilon_nonincreasing = false;
    t.epsilon.push_back(r.epsilon);
    t.gap.push_back(r.gap);
  }
  return t;
}

// delta-hat: max sqrt(2 KL(P(.|s,a) || P(.|s,a-hat))) over sampled (s, a).
// Diagnostic only; it does not certify anything about trained policies.
inline double measure_delta_k(const ActionSelector& selector, const InverseDynamics& inverse,
                              const Featurizer& featurizer, const TabularLatentMdp& env,
                              const ActionRegistry& registry, int n_samples, Rng& rng) {
  return reconstruction_kl(env, registry, n_samples,
                           learned_reconstruction(selector, inverse, featurizer, env, registry), rng)
      .delta();
}

// Random latent-structured instance plus a uniform-support schedule: one change
// per k, `initial` latents first and `per_change` thereafter.
struct VerificationInstance {
  TabularLatentMdp env;
  ChangeSchedule schedule;
};

inline VerificationInstance make_verification_instance(std::uint64_t seed, int n_states, int latent_dim, int n_changes,
                                                       int initial, int per_change, double gamma = 0.9) {
  TabularOptions opt;
  opt.kind = WeightMapKind::multilinear;
  opt.gamma = gamma;
  auto env = generate_tabular(derive_seed(seed, {static_cast<std::uint64_t>(Stream::instance)}), n_states,
                              1 << latent_dim, latent_dim, opt);
  Rng rng = make_rng(seed, {static_cast<std::uint64_t>(Stream::schedule)});
  std::vector<std::int64_t> episodes;
  std::vector<int> counts;
  for (int k = 0; k < n_changes; ++k) {
    episodes.push_back(k);
    counts.push_back(k == 0 ? initial : per_change);
  }
  auto schedule = uniform_schedule(env.latent_space(), episodes, counts, rng);
  return {std::move(env), std::move(schedule)};
}

inline void write_bound_csv(std::ostream& os, const std::vector<BoundRow>& rows) {
  os << "instance,k,n_available,epsilon_k,gap,bound,slack,holds\n";
  os.precision(17);
  for (const auto& r : rows)
    os << r.instance << "," << r.k << "," << r.n_available << "," << r.epsilon << "," << r.gap << "," << r.bound
       << "," << r.slack << "," << (r.holds ? "true" : "false") << "\n";
}

inline nlohmann::json bound_summary(const std::vector<BoundRow>& rows) {
  int held = 0;
  double worst_ratio = 0.0;
  for (const auto& r : rows) {
    held += r.holds;
    if (r.bound + r.slack > 0) worst_ratio = std::max(worst_ratio, r.gap / (r.bound + r.slack));
  }
  return {{"rows", rows.size()},
          {"holds", held},
          {"all_hold", held == static_cast<int>(rows.size())},
          {"max_gap_over_bound", worst_ratio}};
}

}  // namespace laica
