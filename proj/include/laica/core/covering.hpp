#pragma once

#include <limits>
#include <span>
#include <vector>

#include "laica/core/registry.hpp"

namespace laica {

// Regular grid with `per_dim` points per axis including both endpoints.
inline std::vector<Vec> grid_points(const LatentActionSpace& space, int per_dim) {
  if (per_dim < 2) throw DomainError("grid needs at least two points per dimension");
  std::vector<Vec> pts;
  std::vector<int> idx(static_cast<size_t>(space.dim), 0);
  while (true) {
    Vec u(space.dim);
    for (int i = 0; i < space.dim; ++i) u[i] = static_cast<double>(idx[static_cast<size_t>(i)]) / (per_dim - 1);
    pts.push_back(space.from_unit(u));
    int d = 0;
    while (d < space.dim && ++idx[static_cast<size_t>(d)] == per_dim) idx[static_cast<size_t>(d++)] = 0;
    if (d == space.dim) break;
  }
  return pts;
}

// Halton low-discrepancy points (radical inverse in the first d primes).
inline std::vector<Vec> halton_points(const LatentActionSpace& space, int n) {
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (space.dim > static_cast<int>(std::size(primes))) throw DomainError("halton probes support at most 16 dims");
  std::vector<Vec> pts;
  pts.reserve(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    Vec u(space.dim);
    for (int d = 0; d < space.dim; ++d) {
      double f = 1.0, r = 0.0;
      for (int k = i; k > 0; k /= primes[d]) {
        f /= primes[d];
        r += f * (k % primes[d]);
      }
      u[d] = r;
    }
    pts.push_back(space.from_unit(u));
  }
  return pts;
}

// Default probe set: 64^d grid for d <= 2, 4096 low-discrepancy points above.
inline std::vector<Vec> default_probes(const LatentActionSpace& space) {
  return space.dim <= 2 ? grid_points(space, 64) : halton_points(space, 4096);
}

struct CoveringResult {
  double epsilon = 0.0;
  Vec worst_probe;
};

// Max over probes of the L1 distance to the nearest available latent.
inline CoveringResult covering_radius(std::span<const Vec> latents, std::span<const Vec> probes) {
  if (latents.empty()) throw NoAvailableActions();
  CoveringResult out{0.0, probes.empty() ? Vec() : probes.front()};
  for (const auto& p : probes) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& e : latents) nearest = std::min(nearest, (p - e).lpNorm<1>());
    if (nearest > out.epsilon) out = CoveringResult{nearest, p};
  }
  return out;
}

inline CoveringResult covering_radius(const ActionRegistry& registry, std::span<const Vec> probes) {
  auto latents = registry.available_latents();
  return covering_radius(latents, probes);
}

}  // namespace laica
