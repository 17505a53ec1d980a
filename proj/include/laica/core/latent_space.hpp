#pragma once

#include <vector>

#include "laica/errors.hpp"
#include "laica/rng.hpp"

namespace laica {

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
  double width() const { return upper - lower; }
};

// The hidden structure E: a box in R^d whose points are action latents, with the
// Lipschitz constant of the transition kernel in that structure.
struct LatentActionSpace {
  int dim = 1;
  std::vector<Interval> bounds;
  double rho = 0.0;

  static LatentActionSpace unit_box(int dim, double rho = 0.0) {
    return LatentActionSpace{dim, std::vector<Interval>(static_cast<size_t>(dim), Interval{0.0, 1.0}), rho};
  }

  void validate() const {
    if (dim < 1) throw DomainError("latent space dimension must be >= 1");
    if (static_cast<int>(bounds.size()) != dim) throw DomainError("latent space needs one interval per dimension");
    for (const auto& b : bounds)
      if (!(b.lower < b.upper)) throw DomainError("latent space interval is degenerate");
    if (!(rho >= 0.0)) throw DomainError("latent space rho must be non-negative");
  }

  bool contains(const Vec& e, double slack = 1e-12) const {
    if (e.size() != dim) return false;
    for (int i = 0; i < dim; ++i)
      if (e[i] < bounds[i].lower - slack || e[i] > bounds[i].upper + slack) return false;
    return true;
  }

  Vec sample_uniform(Rng& rng) const {
    Vec e(dim);
    for (int i = 0; i < dim; ++i) e[i] = rng.uniform(bounds[i].lower, bounds[i].upper);
    return e;
  }

  // Map from the unit cube onto the box.
  Vec from_unit(const Vec& u) const {
    Vec e(dim);
    for (int i = 0; i < dim; ++i) e[i] = bounds[i].lower + u[i] * bounds[i].width();
    return e;
  }
};

}  // namespace laica
