#pragma once

#include <deque>
#include <vector>

#include "laica/rng.hpp"

namespace laica {

struct TransitionRecord {
  Vec obs;
  int action = -1;
  Vec next_obs;
};

// FIFO transition store; capacity 0 means unbounded.
class TransitionBuffer {
 public:
  explicit TransitionBuffer(size_t capacity = 0) : capacity_(capacity) {}

  void push(TransitionRecord r) {
    if (capacity_ > 0 && records_.size() == capacity_) records_.pop_front();
    records_.push_back(std::move(r));
  }

  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  size_t capacity() const { return capacity_; }
  const TransitionRecord& operator[](size_t i) const { return records_[i]; }
  void clear() { records_.clear(); }

  std::vector<const TransitionRecord*> sample(size_t n, Rng& rng) const {
    std::vector<const TransitionRecord*> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(&records_[static_cast<size_t>(rng.uniform_int(static_cast<int>(size())))]);
    return out;
  }

  // Up to n records at an even stride, for deterministic evaluation passes.
  std::vector<const TransitionRecord*> strided(size_t n) const {
    std::vector<const TransitionRecord*> out;
    if (records_.empty()) return out;
    size_t stride = std::max<size_t>(1, records_.size() / std::max<size_t>(1, n));
    for (size_t i = 0; i < records_.size() && out.size() < n; i += stride) out.push_back(&records_[i]);
    return out;
  }

 private:
  size_t capacity_;
  std::deque<TransitionRecord> records_;
};

}  // namespace laica
