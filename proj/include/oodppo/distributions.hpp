// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "oodppo/rng.hpp"

namespace oodppo {

// Discrete action distribution parameterized by raw logits; probabilities
// are softmax(logits) with log-sum-exp stabilization throughout.
struct Categorical {
  std::vector<double> logits;

  int size() const { return static_cast<int>(logits.size()); }
  std::vector<double> probs() const;
  double logprob(int action) const;
  double entropy() const;  // natural log, in [0, ln N]
  int argmax() const;
  int sample(Rng& rng) const;
};

// Diagonal Gaussian with state-dependent mean and a state-independent
// log-std vector shared across submodels.
struct DiagGaussian {
  std::vector<double> mean;
  std::vector<double> log_std;

  int size() const { return static_cast<int>(mean.size()); }
  double logprob(const std::vector<double>& action) const;
  double entropy() const;
  std::vector<double> sample(Rng& rng) const;
};

std::vector<double> softmax(const std::vector<double>& logits);
double log_sum_exp(const std::vector<double>& xs);

std::pair<double, double> categorical_logprob_entropy(const Categorical& c, int action);
double gaussian_logprob(const DiagGaussian& g, const std::vector<double>& action);

}  // namespace oodppo
