#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "laica/errors.hpp"
#include "laica/rng.hpp"

namespace laica {

enum class SelectMode { sample, greedy };

struct Selection {
  int action_id = -1;
  Vec probabilities;  // aligned with the available ids passed in
};

// phi-hat: one weight row per registered action; Boltzmann over the inner
// products row . e_hat / temperature, restricted to the available ids.
class ActionSelector {
 public:
  ActionSelector() = default;
  ActionSelector(int latent_dim, double temperature = 1.0) : rows_(0, latent_dim), temperature_(temperature) {
    if (latent_dim < 1) throw ShapeError("action selector: latent dimension must be positive");
    if (!(temperature > 0)) throw DomainError("action selector: temperature must be positive");
  }

  int latent_dim() const { return static_cast<int>(rows_.cols()); }
  int rows() const { return static_cast<int>(rows_.rows()); }
  double temperature() const { return temperature_; }
  const Mat& weights() const { return rows_; }
  Mat& weights() { return rows_; }

  // Appends n_new rows initialized uniformly in +-1/sqrt(latent_dim); existing
  // rows are untouched.
  void stack_rows(int n_new, Rng& rng) {
    if (n_new < 1) throw DomainError("stack_rows: need at least one new row");
    Eigen::Index old = rows_.rows();
    rows_.conservativeResize(old + n_new, Eigen::NoChange);
    double bound = 1.0 / std::sqrt(static_cast<double>(latent_dim()));
    for (Eigen::Index r = old; r < rows_.rows(); ++r)
      for (Eigen::Index c = 0; c < rows_.cols(); ++c) rows_(r, c) = rng.uniform(-bound, bound);
  }

  Vec scores(const Vec& e_hat, std::span<const int> ids) const {
    check(e_hat, ids);
    Vec s(static_cast<Eigen::Index>(ids.size()));
    for (size_t i = 0; i < ids.size(); ++i) s[static_cast<Eigen::Index>(i)] = rows_.row(ids[i]).dot(e_hat) / temperature_;
    return s;
  }

  Vec probabilities(const Vec& e_hat, std::span<const int> ids) const {
    Vec s = scores(e_hat, ids);
    Vec p = (s.array() - s.maxCoeff()).exp();
    return p / p.sum();
  }

  Selection select(const Vec& e_hat, std::span<const int> ids, Rng& rng, SelectMode mode = SelectMode::sample) const {
    Selection out;
    out.probabilities = probabilities(e_hat, ids);
    Eigen::Index k = 0;
    if (mode == SelectMode::greedy)
      out.probabilities.maxCoeff(&k);
    else
      k = rng.categorical(out.probabilities);
    out.action_id = ids[static_cast<size_t>(k)];
    return out;
  }

  // log phi-hat(action | e_hat) over `ids`; accumulates d/d rows into row_grad
  // (same shape as weights()) and returns d/d e_hat, both scaled by `scale`.
  double log_prob_backward(int action, const Vec& e_hat, std::span<const int> ids, Mat& row_grad, Vec& e_grad,
                           double scale = 1.0) const {
    Vec s = scores(e_hat, ids);
    double m = s.maxCoeff();
    Vec p = (s.array() - m).exp();
    double z = p.sum();
    p /= z;
    double lse = m + std::log(z);
    Vec expected_row = Vec::Zero(latent_dim());
    double log_p = 0.0;
    bool found = false;
    for (size_t i = 0; i < ids.size(); ++i) {
      double pi = p[static_cast<Eigen::Index>(i)];
      double ind = ids[i] == action ? 1.0 : 0.0;
      if (ids[i] == action) {
        found = true;
        log_p = s[static_cast<Eigen::Index>(i)] - lse;
      }
      row_grad.row(ids[i]) += scale * (ind - pi) / temperature_ * e_hat.transpose();
      expected_row += pi * rows_.row(ids[i]).transpose();
    }
    if (!found) throw DomainError("action selector: action not among the available ids");
    e_grad += scale * (rows_.row(action).transpose() - expected_row) / temperature_;
    return log_p;
  }

  double log_prob(int action, const Vec& e_hat, std::span<const int> ids) const {
    Vec s = scores(e_hat, ids);
    double m = s.maxCoeff();
    double lse = m + std::log((s.array() - m).exp().sum());
    for (size_t i = 0; i < ids.size(); ++i)
      if (ids[i] == action) return s[static_cast<Eigen::Index>(i)] - lse;
    throw DomainError("action selector: action not among the available ids");
  }

 private:
  void check(const Vec& e_hat, std::span<const int> ids) const {
    if (ids.empty()) throw NoAvailableActions();
    if (e_hat.size() != rows_.cols()) throw ShapeError("action selector: latent dimension mismatch");
    for (int id : ids)
      if (id < 0 || id >= rows()) throw DomainError("action selector: unregistered action " + std::to_string(id));
  }

  Mat rows_;
  double temperature_ = 1.0;
};

}  // namespace laica
