#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "laica/adapt/buffer.hpp"
#include "laica/policy/action_selector.hpp"
#include "laica/policy/featurizer.hpp"
#include "laica/policy/inverse_dynamics.hpp"

namespace laica {

// KL(N(mean, diag(std^2)) || N(0, I)).
inline double gaussian_kl_to_standard(const Vec& mean, const Vec& std) {
  if (mean.size() != std.size()) throw ShapeError("gaussian kl: mean/std length mismatch");
  if ((std.array() <= 0.0).any()) throw DomainError("gaussian kl: std must be strictly positive");
  return 0.5 * (std.array().square() + mean.array().square() - 1.0 - 2.0 * std.array().log()).sum();
}

struct LowerBoundResult {
  double objective = 0.0;       // mean of log phi-hat(a|e) - lambda KL
  double log_likelihood = 0.0;  // mean log phi-hat(a|e)
  double kl = 0.0;              // mean KL term, always >= 0
  Mat selector_grad;            // d objective / d selector rows
  Vec encoder_grad;             // d objective / d encoder params
};

// Variational lower bound on a batch with one reparameterized latent per
// record, drawn from the supplied noise. Gradients are exact for that noise.
inline LowerBoundResult lower_bound_batch(const ActionSelector& selector, const InverseDynamics& inverse,
                                          const Featurizer& featurizer,
                                          std::span<const TransitionRecord* const> batch,
                                          std::span<const int> available, double lambda, std::span<const Vec> noise) {
  if (batch.empty()) throw DomainError("lower bound: empty batch");
  if (noise.size() != batch.size()) throw ShapeError("lower bound: need one noise vector per record");
  if (lambda < 0) throw DomainError("lower bound: lambda must be non-negative");
  const int d = inverse.latent_dim();
  const double w = 1.0 / static_cast<double>(batch.size());
  LowerBoundResult out;
  out.selector_grad = Mat::Zero(selector.rows(), selector.latent_dim());
  out.encoder_grad = Vec::Zero(inverse.encoder().size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto& rec = *batch[i];
    if (rec.action < 0 || rec.action >= selector.rows())
      throw DomainError("lower bound: unregistered action " + std::to_string(rec.action));
    auto enc = inverse.encode(featurizer(rec.obs), featurizer(rec.next_obs));
    const Vec& z = noise[i];
    Vec e = enc.mean + enc.std.cwiseProduct(z);
    Vec e_grad = Vec::Zero(d);
    double ll = selector.log_prob_backward(rec.action, e, available, out.selector_grad, e_grad, w);
    double kl = gaussian_kl_to_standard(enc.mean, enc.std);
    Vec g_mean = e_grad - lambda * w * enc.mean;
    Vec g_std = e_grad.cwiseProduct(z) - lambda * w * (enc.std - enc.std.cwiseInverse());
    inverse.backward(enc, g_mean, g_std, out.encoder_grad);
    out.log_likelihood += w * ll;
    out.kl += w * kl;
  }
  out.objective = out.log_likelihood - lambda * out.kl;
  return out;
}

inline LowerBoundResult lower_bound_batch(const ActionSelector& selector, const InverseDynamics& inverse,
                                          const Featurizer& featurizer,
                                          std::span<const TransitionRecord* const> batch,
                                          std::span<const int> available, double lambda, Rng& rng) {
  std::vector<Vec> noise;
  noise.reserve(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) noise.push_back(rng.normal_vec(inverse.latent_dim()));
  return lower_bound_batch(selector, inverse, featurizer, batch, available, lambda, noise);
}

// Fraction of records whose action is the argmax of phi-hat at the encoder mean.
inline double prediction_accuracy(const ActionSelector& selector, const InverseDynamics& inverse,
                                  const Featurizer& featurizer, std::span<const TransitionRecord* const> records,
                                  std::span<const int> available) {
  if (records.empty()) return 0.0;
  Rng unused(0);
  int hits = 0;
  for (const auto* r : records) {
    auto enc = inverse.encode(featurizer(r->obs), featurizer(r->next_obs));
    if (selector.select(enc.mean, available, unused, SelectMode::greedy).action_id == r->action) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

}  // namespace laica
