#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "laica/core/registry.hpp"

namespace laica {

// Pre-materialized change process: the episodes at which the action set grows,
// and the latents that arrive at each of them.
struct ChangeSchedule {
  std::vector<std::int64_t> change_episodes;
  std::vector<std::vector<Vec>> additions;

  int n_changes() const { return static_cast<int>(change_episodes.size()); }

  void validate() const {
    if (change_episodes.size() != additions.size())
      throw DomainError("schedule needs one addition list per change episode");
    for (size_t i = 0; i < change_episodes.size(); ++i) {
      if (i > 0 && change_episodes[i] <= change_episodes[i - 1])
        throw DomainError("schedule change episodes must be strictly increasing");
      if (additions[i].empty()) throw DomainError("every change must add at least one action");
    }
  }

  // Index of the change scheduled at this episode, or -1.
  int change_index_at(std::int64_t episode) const {
    auto it = std::lower_bound(change_episodes.begin(), change_episodes.end(), episode);
    if (it == change_episodes.end() || *it != episode) return -1;
    return static_cast<int>(it - change_episodes.begin());
  }

  bool operator==(const ChangeSchedule&) const = default;
};

// Applies the change at `episode_index` if one is scheduled; returns the count added.
// Applying the same episode twice is a caller bug and is not detected here.
inline int apply_change(ActionRegistry& registry, const ChangeSchedule& schedule, std::int64_t episode_index) {
  int idx = schedule.change_index_at(episode_index);
  if (idx < 0) return 0;
  return static_cast<int>(registry.add_change(schedule.additions[static_cast<size_t>(idx)]).size());
}

// Sizes of an n-way split where earlier sets absorb the remainder.
inline std::vector<int> equal_split_sizes(int total, int n_sets) {
  if (n_sets < 1) throw DomainError("split needs at least one set");
  std::vector<int> sizes(static_cast<size_t>(n_sets), total / n_sets);
  for (int i = 0; i < total % n_sets; ++i) ++sizes[static_cast<size_t>(i)];
  return sizes;
}

// Random partition of a fixed latent pool into n_sets near-equal groups, one per change.
inline ChangeSchedule split_schedule(std::vector<Vec> pool, int n_sets, std::int64_t episodes_per_segment, Rng& rng) {
  std::shuffle(pool.begin(), pool.end(), rng.engine());
  ChangeSchedule s;
  size_t at = 0;
  int seg = 0;
  for (int size : equal_split_sizes(static_cast<int>(pool.size()), n_sets)) {
    s.change_episodes.push_back(seg++ * episodes_per_segment);
    s.additions.emplace_back(pool.begin() + static_cast<std::ptrdiff_t>(at),
                             pool.begin() + static_cast<std::ptrdiff_t>(at + static_cast<size_t>(size)));
    at += static_cast<size_t>(size);
  }
  s.validate();
  return s;
}

// Additions drawn uniformly over E (full element-wise support).
inline ChangeSchedule uniform_schedule(const LatentActionSpace& space, const std::vector<std::int64_t>& episodes,
                                       const std::vector<int>& counts, Rng& rng) {
  if (episodes.size() != counts.size()) throw DomainError("uniform schedule needs one count per change");
  ChangeSchedule s;
  s.change_episodes = episodes;
  for (int c : counts) {
    std::vector<Vec> add;
    for (int i = 0; i < c; ++i) add.push_back(space.sample_uniform(rng));
    s.additions.push_back(std::move(add));
  }
  s.validate();
  return s;
}

inline nlohmann::json to_json(const ChangeSchedule& s) {
  nlohmann::json adds = nlohmann::json::array();
  for (const auto& change : s.additions) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& e : change) c.push_back(std::vector<double>(e.data(), e.data() + e.size()));
    adds.push_back(std::move(c));
  }
  return nlohmann::json{{"change_episodes", s.change_episodes}, {"additions", std::move(adds)}};
}

inline ChangeSchedule schedule_from_json(const nlohmann::json& j) {
  ChangeSchedule s;
  s.change_episodes = j.at("change_episodes").get<std::vector<std::int64_t>>();
  for (const auto& change : j.at("additions")) {
    std::vector<Vec> add;
    for (const auto& e : change) {
      auto v = e.get<std::vector<double>>();
      add.push_back(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    s.additions.push_back(std::move(add));
  }
  s.validate();
  return s;
}

}  // namespace laica
