#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "laica/approx/param_map.hpp"

namespace laica {

// Elementwise |a-b| / max(|a|,|b|,1e-8), maximized.
inline double max_relative_error(const Vec& analytic, const Vec& numeric) {
  if (analytic.size() != numeric.size()) throw ShapeError("gradient check: length mismatch");
  if (!analytic.allFinite() || !numeric.allFinite()) throw DomainError("gradient check: non-finite gradient");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    double a = analytic[i], b = numeric[i];
    double denom = std::max({std::abs(a), std::abs(b), 1e-8});
    worst = std::max(worst, std::abs(a - b) / denom);
  }
  return worst;
}

// Central differences of a scalar function.
inline Vec numeric_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  Vec g(x.size());
  Vec xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double orig = xp[i];
    xp[i] = orig + h;
    double fp = f(xp);
    xp[i] = orig - h;
    double fm = f(xp);
    xp[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline double check_gradient(const std::function<double(const Vec&)>& f, const Vec& analytic, const Vec& x,
                             double h) {
  return max_relative_error(analytic, numeric_gradient(f, x, h));
}

// Compares analytic parameter and input gradients of u.map(x) against central
// differences at n_probes random (x, u) draws.
inline double gradient_check(const ParamMap& map, int n_probes, double h, Rng& rng) {
  if (!map.all_finite()) throw DomainError("gradient check: non-finite parameters");
  double worst = 0.0;
  for (int probe = 0; probe < n_probes; ++probe) {
    Vec x(map.input_dim());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1.0, 1.0);
    Vec u = rng.normal_vec(map.output_dim());
    auto pass = map.forward_backward(x, u);

    ParamMap probe_map = map;
    auto of_params = [&](const Vec& p) {
      probe_map.set_params(p);
      return u.dot(probe_map.forward(x));
    };
    worst = std::max(worst, check_gradient(of_params, pass.parameter_gradient, map.params(), h));
    auto of_input = [&](const Vec& xi) { return u.dot(map.forward(xi)); };
    worst = std::max(worst, check_gradient(of_input, pass.input_gradient, x, h));
  }
  return worst;
}

}  // namespace laica
