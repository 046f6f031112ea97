// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/distributions.hpp"

#include <algorithm>
#include <cmath>

#include "oodppo/errors.hpp"

namespace oodppo {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
}

double log_sum_exp(const std::vector<double>& xs) {
  double mx = xs[0];
  for (double x : xs) mx = std::max(mx, x);
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

std::vector<double> softmax(const std::vector<double>& logits) {
  double mx = logits[0];
  for (double x : logits) mx = std::max(mx, x);
  std::vector<double> out(logits.size());
  double s = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    s += out[i];
  }
  for (double& p : out) p /= s;
  return out;
}

std::vector<double> Categorical::probs() const { return softmax(logits); }

double Categorical::logprob(int action) const {
  if (action < 0 || action >= size())
    throw ConfigError("Categorical::logprob: action index out of range");
  return logits[action] - log_sum_exp(logits);
}

double Categorical::entropy() const {
  const std::vector<double> p = probs();
  double h = 0.0;
  for (double pi : p)
    if (pi > 0.0) h -= pi * std::log(pi);
  return h;
}

int Categorical::argmax() const {
  int best = 0;
  for (int i = 1; i < size(); ++i)
    if (logits[i] > logits[best]) best = i;
  return best;
}

int Categorical::sample(Rng& rng) const {
  const std::vector<double> p = probs();
  const double u = rng.uniform();
  double acc = 0.0;
  for (int i = 0; i < size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return size() - 1;
}

double DiagGaussian::logprob(const std::vector<double>& action) const {
  if (action.size() != mean.size())
    throw ConfigError("DiagGaussian::logprob: action length mismatch");
  double lp = -0.5 * static_cast<double>(size()) * kLogTwoPi;
  for (int j = 0; j < size(); ++j) {
    const double sd = std::exp(log_std[j]);
    const double z = (action[j] - mean[j]) / sd;
    lp += -0.5 * z * z - log_std[j];
  }
  return lp;
}

double DiagGaussian::entropy() const {
  // 0.5 * log(2*pi*e) per dimension plus sum of log-stds.
  double h = 0.5 * static_cast<double>(size()) * (kLogTwoPi + 1.0);
  for (double ls : log_std) h += ls;
  return h;
}

std::vector<double> DiagGaussian::sample(Rng& rng) const {
  std::vector<double> out(mean.size());
  for (int j = 0; j < size(); ++j)
    out[j] = mean[j] + std::exp(log_std[j]) * rng.normal();
  return out;
}

std::pair<double, double> categorical_logprob_entropy(const Categorical& c, int action) {
  return {c.logprob(action), c.entropy()};
}

double gaussian_logprob(const DiagGaussian& g, const std::vector<double>& action) {
  return g.logprob(action);
}

}  // namespace oodppo
