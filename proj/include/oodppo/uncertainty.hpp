// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "oodppo/agent.hpp"
#include "oodppo/distributions.hpp"

namespace oodppo {

// Population standard deviation of the k submodel value estimates for one
// state. A proxy for state-visitation frequency.
double value_uncertainty(const std::vector<double>& values);

// Mean over action dimensions of the population std of the k submodel mean
// vectors (continuous policies).
double policy_uncertainty_std_continuous(const std::vector<std::vector<double>>& means);

// Same statistic over raw logits (categorical policies). `on_probs` switches
// to softmax probabilities instead of logits.
double policy_uncertainty_std_categorical(const std::vector<std::vector<double>>& logits,
                                          bool on_probs = false);

// 1 - max_a of the averaged distribution pi_mu = (1/k) sum_h softmax(logits_h).
double max_prob_uncertainty(const std::vector<Categorical>& dists);

// Entropy (natural log) of the averaged distribution.
double entropy_uncertainty(const std::vector<Categorical>& dists);

// Largest pairwise symmetrized KL between the k categorical distributions;
// probabilities are clamped below by 1e-12 before taking logs.
double policy_uncertainty_js_categorical(const std::vector<Categorical>& dists);

// Divergence-based disagreement for diagonal Gaussians sharing a covariance
// diag(sigma), sigma given as per-dimension *covariance* entries. With a
// common scalar sigma this is the closed form sigma * ||mu_i - mu_j||^2,
// maximized over pairs; with per-dimension entries it falls back to the
// symmetrized-KL expression 0.5 * sum_d (mu_i - mu_j)_d^2 / sigma_d.
double policy_uncertainty_js_continuous(const std::vector<std::vector<double>>& means,
                                        const std::vector<double>& sigma);

struct UncertaintyReport {
  double value_u = 0.0;
  double policy_u_std = 0.0;
  double policy_u_js = 0.0;
  std::optional<double> max_prob_u;  // categorical spaces only
  std::optional<double> entropy_u;   // categorical spaces only
};

struct UncertaintyOptions {
  bool cat_std_on_probs = false;
};

UncertaintyReport evaluate_uncertainty(const SubmodelBundle& bundle, int row,
                                       const UncertaintyOptions& opt = {});
std::vector<UncertaintyReport> evaluate_uncertainty_batch(const SubmodelBundle& bundle,
                                                          const UncertaintyOptions& opt = {});

}  // namespace oodppo
