#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Core>

namespace laica {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream split: the same (master, path...) always yields the same
// child seed, and distinct paths give statistically independent streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (auto p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

// Named stream identifiers so call sites read as intent rather than magic numbers.
enum class Stream : std::uint64_t {
  schedule = 1,
  environment = 2,
  init = 3,
  adaptation = 4,
  improvement = 5,
  row_init = 6,
  probes = 7,
  instance = 8,
  reinit = 9,
  trial = 10,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  Rng child(std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(engine_(), path));
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return normal_(engine_); }
  int uniform_int(int n) { return std::uniform_int_distribution<int>(0, n - 1)(engine_); }
  bool bernoulli(double p) { return uniform() < p; }

  Vec normal_vec(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  // Index drawn from an unnormalized non-negative weight vector.
  int categorical(const Vec& probs) {
    double u = uniform() * probs.sum();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    for (Eigen::Index i = probs.size() - 1; i >= 0; --i)
      if (probs[i] > 0.0) return static_cast<int>(i);
    return static_cast<int>(probs.size() - 1);
  }

  Vec dirichlet_ones(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = -std::log(1.0 - uniform());
    return v / v.sum();
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(master, path));
}

}  // namespace laica
