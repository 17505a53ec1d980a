#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "laica/core/environment.hpp"

namespace laica {

enum class WeightMapKind { affine, multilinear };

// Map from a latent e in [0,1]^d to mixture weights over anchor kernels.
//   affine:      w(e) = offset + slope * e
//   multilinear: 2^d anchors sit on the cube corners, w is the tensor-product
//                interpolation (affine in each coordinate separately)
struct WeightMap {
  WeightMapKind kind = WeightMapKind::affine;
  int dim = 1;
  int n_anchors = 2;
  Vec offset;
  Mat slope;

  Vec weights(const Vec& e) const {
    if (kind == WeightMapKind::affine) return offset + slope * e;
    Vec w(n_anchors);
    for (int c = 0; c < n_anchors; ++c) {
      double p = 1.0;
      for (int i = 0; i < dim; ++i) p *= (c >> i & 1) ? e[i] : 1.0 - e[i];
      w[c] = p;
    }
    return w;
  }

  // Bound on the probability mass moved between anchors per unit L1 change of e:
  // (1/2)||w(e) - w(e')||_1 <= mass_lipschitz() * ||e - e'||_1 on the unit box.
  double mass_lipschitz() const {
    if (kind == WeightMapKind::multilinear) return 1.0;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < slope.cols(); ++j) worst = std::max(worst, 0.5 * slope.col(j).lpNorm<1>());
    return worst;
  }
};

// Tabular latent-structured MDP: P(.|s,e) = sum_m w_m(e) P_m(.|s), reward r(s).
class TabularLatentMdp final : public Environment {
 public:
  TabularLatentMdp() = default;
  TabularLatentMdp(std::vector<Mat> anchors, WeightMap weight_map, Vec reward, double gamma, Vec initial,
                   int horizon = 50)
      : anchors_(std::move(anchors)), weight_map_(std::move(weight_map)), reward_(std::move(reward)),
        initial_(std::move(initial)) {
    info_.n_states = static_cast<int>(reward_.size());
    info_.observation_dim = info_.n_states;
    info_.gamma = gamma;
    info_.r_max = reward_.cwiseAbs().maxCoeff();
    if (info_.r_max <= 0) info_.r_max = 1.0;
    info_.horizon = horizon;
    validate();
    rho_ = anchor_diameter() * weight_map_.mass_lipschitz();
  }

  const BaseMdpInfo& info() const override { return info_; }
  int latent_dim() const override { return weight_map_.dim; }
  int n_states() const { return info_.n_states; }
  double gamma() const { return info_.gamma; }
  double r_max() const { return info_.r_max; }
  double rho() const { return rho_; }
  const Vec& reward() const { return reward_; }
  const Vec& initial_distribution() const { return initial_; }
  const std::vector<Mat>& anchors() const { return anchors_; }
  const WeightMap& weight_map() const { return weight_map_; }
  LatentActionSpace latent_space() const { return LatentActionSpace::unit_box(weight_map_.dim, rho_); }

  // max_s max_{m,m'} ||P_m(.|s) - P_m'(.|s)||_1
  double anchor_diameter() const {
    double d = 0.0;
    for (size_t a = 0; a < anchors_.size(); ++a)
      for (size_t b = a + 1; b < anchors_.size(); ++b)
        for (int s = 0; s < n_states(); ++s) d = std::max(d, (anchors_[a].row(s) - anchors_[b].row(s)).lpNorm<1>());
    return d;
  }

  Mat kernel(const Vec& e) const {
    Vec w = weight_map_.weights(e);
    Mat p = Mat::Zero(n_states(), n_states());
    for (size_t m = 0; m < anchors_.size(); ++m) p += w[static_cast<Eigen::Index>(m)] * anchors_[m];
    return p;
  }

  Vec kernel_row(int s, const Vec& e) const {
    Vec w = weight_map_.weights(e);
    Vec row = Vec::Zero(n_states());
    for (size_t m = 0; m < anchors_.size(); ++m) row += w[static_cast<Eigen::Index>(m)] * anchors_[m].row(s).transpose();
    return row;
  }

  EnvState state_of(int s) const {
    EnvState st;
    st.index = s;
    st.obs = Vec::Zero(n_states());
    st.obs[s] = 1.0;
    return st;
  }

  EnvState reset(Rng& rng) const override { return state_of(rng.categorical(initial_)); }

  StepResult step(const EnvState& state, const Vec& latent, Rng& rng) const override {
    StepResult r;
    int next = rng.categorical(kernel_row(state.index, latent));
    r.next = state_of(next);
    r.next.t = state.t + 1;
    r.reward = reward_[next];
    r.terminal = r.next.t >= info_.horizon;
    r.next.terminal = r.terminal;
    return r;
  }

  void validate() const {
    if (n_states() < 2) throw DomainError("tabular MDP needs at least two states");
    if (static_cast<int>(anchors_.size()) != weight_map_.n_anchors) throw DomainError("anchor count mismatch");
    for (const auto& a : anchors_) {
      if (a.rows() != n_states() || a.cols() != n_states()) throw ShapeError("anchor kernel shape mismatch");
      for (int s = 0; s < n_states(); ++s)
        if (std::abs(a.row(s).sum() - 1.0) > 1e-12 || a.row(s).minCoeff() < 0)
          throw DomainError("anchor kernel rows must be distributions");
    }
    if (initial_.size() != n_states()) throw ShapeError("initial distribution shape mismatch");
    if (!(info_.gamma >= 0 && info_.gamma < 1)) throw DomainError("gamma must lie in [0,1)");
  }

 private:
  std::vector<Mat> anchors_;
  WeightMap weight_map_;
  Vec reward_;
  Vec initial_;
  BaseMdpInfo info_;
  double rho_ = 0.0;
};

inline Mat dirichlet_kernel(int n_states, Rng& rng) {
  Mat p(n_states, n_states);
  for (int s = 0; s < n_states; ++s) p.row(s) = rng.dirichlet_ones(n_states).transpose();
  return p;
}

// Affine weights that send e = 0 to anchor 0 and spread each latent axis toward
// a later anchor: w(e) = (1 - sum(e)/d) v_0 + sum_j (e_j/d) v_{1 + j mod (m-1)}.
inline WeightMap vertex_affine_weights(int n_anchors, int latent_dim) {
  WeightMap w;
  w.kind = WeightMapKind::affine;
  w.dim = latent_dim;
  w.n_anchors = n_anchors;
  w.offset = Vec::Zero(n_anchors);
  w.offset[0] = 1.0;
  w.slope = Mat::Zero(n_anchors, latent_dim);
  for (int j = 0; j < latent_dim; ++j) {
    w.slope(0, j) -= 1.0 / latent_dim;
    w.slope(1 + j % (n_anchors - 1), j) += 1.0 / latent_dim;
  }
  return w;
}

inline WeightMap multilinear_weights(int latent_dim) {
  WeightMap w;
  w.kind = WeightMapKind::multilinear;
  w.dim = latent_dim;
  w.n_anchors = 1 << latent_dim;
  return w;
}

struct TabularOptions {
  WeightMapKind kind = WeightMapKind::affine;
  double gamma = 0.9;
  int horizon = 50;
};

// Random instance with Dirichlet(1,...,1) anchor rows, rewards uniform in [-1,1]
// and a point-mass start at state 0. Multilinear instances ignore n_anchors
// beyond requiring it to equal 2^latent_dim.
inline TabularLatentMdp generate_tabular(std::uint64_t seed, int n_states, int n_anchors, int latent_dim,
                                         const TabularOptions& opt = {}) {
  if (n_states < 2 || n_anchors < 2 || latent_dim < 1) throw DomainError("generate_tabular: invalid sizes");
  WeightMap w = opt.kind == WeightMapKind::affine ? vertex_affine_weights(n_anchors, latent_dim)
                                                  : multilinear_weights(latent_dim);
  if (w.n_anchors != n_anchors) throw DomainError("multilinear weights need 2^latent_dim anchors");
  Rng rng(seed);
  std::vector<Mat> anchors;
  for (int m = 0; m < n_anchors; ++m) anchors.push_back(dirichlet_kernel(n_states, rng));
  Vec reward(n_states);
  for (int s = 0; s < n_states; ++s) reward[s] = rng.uniform(-1.0, 1.0);
  Vec initial = Vec::Zero(n_states);
  initial[0] = 1.0;
  return TabularLatentMdp(std::move(anchors), std::move(w), std::move(reward), opt.gamma, std::move(initial),
                          opt.horizon);
}

// Instance where each cube corner is a deterministic cyclic shift s -> s + m,
// so the next state identifies the corner action. Needs 2^latent_dim <= n_states.
inline TabularLatentMdp generate_injective_tabular(std::uint64_t seed, int n_states, int latent_dim = 2,
                                                   const TabularOptions& opt = {}) {
  int corners = 1 << latent_dim;
  if (corners > n_states) throw DomainError("injective instance needs 2^latent_dim <= n_states");
  Rng rng(seed);
  std::vector<int> shift(static_cast<size_t>(n_states));
  for (int i = 0; i < n_states; ++i) shift[static_cast<size_t>(i)] = i;
  std::shuffle(shift.begin(), shift.end(), rng.engine());
  std::vector<Mat> anchors;
  for (int m = 0; m < corners; ++m) {
    Mat p = Mat::Zero(n_states, n_states);
    for (int s = 0; s < n_states; ++s) p(s, (s + shift[static_cast<size_t>(m)]) % n_states) = 1.0;
    anchors.push_back(std::move(p));
  }
  Vec reward(n_states);
  for (int s = 0; s < n_states; ++s) reward[s] = rng.uniform(-1.0, 1.0);
  Vec initial = Vec::Constant(n_states, 1.0 / n_states);
  return TabularLatentMdp(std::move(anchors), multilinear_weights(latent_dim), std::move(reward), opt.gamma,
                          std::move(initial), opt.horizon);
}

inline std::vector<Vec> cube_corners(int dim) {
  std::vector<Vec> out;
  for (int c = 0; c < (1 << dim); ++c) {
    Vec e(dim);
    for (int i = 0; i < dim; ++i) e[i] = (c >> i) & 1;
    out.push_back(e);
  }
  return out;
}

inline nlohmann::json to_json(const TabularLatentMdp& m) {
  auto mat = [](const Mat& a) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      std::vector<double> row(static_cast<size_t>(a.cols()));
      for (Eigen::Index c = 0; c < a.cols(); ++c) row[static_cast<size_t>(c)] = a(r, c);
      rows.push_back(row);
    }
    return rows;
  };
  auto vec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json anchors = nlohmann::json::array();
  for (const auto& a : m.anchors()) anchors.push_back(mat(a));
  const auto& w = m.weight_map();
  nlohmann::json wj{{"kind", w.kind == WeightMapKind::affine ? "affine" : "multilinear"},
                    {"dim", w.dim},
                    {"n_anchors", w.n_anchors}};
  if (w.kind == WeightMapKind::affine) {
    wj["offset"] = vec(w.offset);
    wj["slope"] = mat(w.slope);
  }
  return nlohmann::json{{"anchors", anchors},   {"weight_map", wj},       {"reward", vec(m.reward())},
                        {"gamma", m.gamma()},   {"initial", vec(m.initial_distribution())},
                        {"horizon", m.info().horizon}, {"rho", m.rho()}};
}

inline TabularLatentMdp tabular_from_json(const nlohmann::json& j) {
  auto vec = [](const nlohmann::json& a) {
    auto v = a.get<std::vector<double>>();
    return Vec(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  auto mat = [](const nlohmann::json& a) {
    Mat out(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(a.at(0).size()));
    for (size_t r = 0; r < a.size(); ++r)
      for (size_t c = 0; c < a[r].size(); ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a[r][c];
    return out;
  };
  std::vector<Mat> anchors;
  for (const auto& a : j.at("anchors")) anchors.push_back(mat(a));
  const auto& wj = j.at("weight_map");
  WeightMap w;
  w.kind = wj.at("kind") == "affine" ? WeightMapKind::affine : WeightMapKind::multilinear;
  w.dim = wj.at("dim");
  w.n_anchors = wj.at("n_anchors");
  if (w.kind == WeightMapKind::affine) {
    w.offset = vec(wj.at("offset"));
    w.slope = mat(wj.at("slope"));
  }
  return TabularLatentMdp(std::move(anchors), std::move(w), vec(j.at("reward")), j.at("gamma").get<double>(),
                          vec(j.at("initial")), j.at("horizon").get<int>());
}

}  // namespace laica
