#pragma once

#include <ostream>
#include <vector>

#include "laica/core/latent_space.hpp"
#include "laica/errors.hpp"

namespace laica {

struct ActionEntry {
  int action_id = 0;
  Vec latent;
  int added_at_change = 0;
};

// Observed discrete actions and the hidden latent behind each. Append-only:
// ids are dense in insertion order and never reused.
class ActionRegistry {
 public:
  ActionRegistry() = default;
  explicit ActionRegistry(LatentActionSpace space) : space_(std::move(space)) { space_.validate(); }

  const LatentActionSpace& space() const { return space_; }
  int current_k() const { return current_k_; }
  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<ActionEntry>& entries() const { return entries_; }
  const ActionEntry& entry(int action_id) const { return entries_.at(static_cast<size_t>(action_id)); }

  // Opens change k+1 and appends its latents; returns the new ids.
  std::vector<int> add_change(const std::vector<Vec>& latents) {
    ++current_k_;
    std::vector<int> ids;
    ids.reserve(latents.size());
    for (const auto& e : latents) {
      if (!space_.contains(e)) throw DomainError("latent outside the latent action space bounds");
      int id = size();
      entries_.push_back(ActionEntry{id, e, current_k_});
      ids.push_back(id);
    }
    return ids;
  }

  bool is_available(int action_id, int k) const {
    return action_id >= 0 && action_id < size() && entries_[static_cast<size_t>(action_id)].added_at_change <= k;
  }
  bool is_available(int action_id) const { return is_available(action_id, current_k_); }

  std::vector<int> available_ids(int k) const {
    std::vector<int> ids;
    for (const auto& a : entries_)
      if (a.added_at_change <= k) ids.push_back(a.action_id);
    return ids;
  }
  std::vector<int> available_ids() const { return available_ids(current_k_); }

  std::vector<Vec> available_latents(int k) const {
    std::vector<Vec> out;
    for (const auto& a : entries_)
      if (a.added_at_change <= k) out.push_back(a.latent);
    return out;
  }
  std::vector<Vec> available_latents() const { return available_latents(current_k_); }

  const Vec& latent_of(int action_id) const {
    if (!is_available(action_id)) throw ActionUnavailable(action_id);
    return entries_[static_cast<size_t>(action_id)].latent;
  }

  bool operator==(const ActionRegistry& o) const {
    if (current_k_ != o.current_k_ || entries_.size() != o.entries_.size()) return false;
    for (size_t i = 0; i < entries_.size(); ++i) {
      const auto& a = entries_[i];
      const auto& b = o.entries_[i];
      if (a.action_id != b.action_id || a.added_at_change != b.added_at_change || a.latent != b.latent) return false;
    }
    return true;
  }

  // CSV dump: action_id, added_at_change, e0, e1, ...
  void write_csv(std::ostream& os) const {
    os << "action_id,added_at_change";
    for (int i = 0; i < space_.dim; ++i) os << ",e" << i;
    os << "\n";
    os.precision(17);
    for (const auto& a : entries_) {
      os << a.action_id << "," << a.added_at_change;
      for (Eigen::Index i = 0; i < a.latent.size(); ++i) os << "," << a.latent[i];
      os << "\n";
    }
  }

 private:
  LatentActionSpace space_ = LatentActionSpace::unit_box(1);
  std::vector<ActionEntry> entries_;
  int current_k_ = 0;
};

}  // namespace laica
