// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/rollout.hpp"

#include <cmath>

#include "oodppo/errors.hpp"

namespace oodppo {

RolloutBuffer::RolloutBuffer(int num_envs, int steps_per_env)
    : num_envs_(num_envs), steps_per_env_(steps_per_env) {
  if (num_envs < 1 || steps_per_env < 1)
    throw ConfigError("RolloutBuffer: capacity must be positive");
  data_.resize(capacity());
  bootstrap_.assign(num_envs, std::nan(""));
  advantages_.assign(capacity(), 0.0);
  returns_.assign(capacity(), 0.0);
}

void RolloutBuffer::store(int env, int step, Transition t) {
  if (env < 0 || env >= num_envs_ || step < 0 || step >= steps_per_env_)
    throw ConfigError("RolloutBuffer::store: slot out of range");
  if (!std::isfinite(t.reward) || !std::isfinite(t.logprob))
    throw DivergenceError("RolloutBuffer::store: non-finite reward or logprob");
  data_[flat(env, step)] = std::move(t);
}

void RolloutBuffer::compute_advantages(double gamma, double lambda) {
  std::vector<double> rewards(steps_per_env_), values(steps_per_env_);
  std::vector<std::uint8_t> dones(steps_per_env_);
  for (int e = 0; e < num_envs_; ++e) {
    if (std::isnan(bootstrap_[e]))
      throw ConfigError("RolloutBuffer: missing bootstrap value");
    for (int s = 0; s < steps_per_env_; ++s) {
      const Transition& t = data_[flat(e, s)];
      rewards[s] = t.reward;
      values[s] = t.value;
      dones[s] = t.done ? 1 : 0;
    }
    GaeResult g = compute_gae(rewards, values, dones, bootstrap_[e], gamma, lambda);
    for (int s = 0; s < steps_per_env_; ++s) {
      advantages_[flat(e, s)] = g.advantages[s];
      returns_[flat(e, s)] = g.returns[s];
    }
  }
  advantages_ready_ = true;
}

GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<std::uint8_t>& dones, double bootstrap_value,
                      double gamma, double lambda) {
  const int n = static_cast<int>(rewards.size());
  if (static_cast<int>(values.size()) != n || static_cast<int>(dones.size()) != n)
    throw ConfigError("compute_gae: input lengths differ");
  if (!std::isfinite(bootstrap_value)) throw ConfigError("compute_gae: missing bootstrap value");
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double gae = 0.0;
  for (int t = n - 1; t >= 0; --t) {
    const double not_done = dones[t] ? 0.0 : 1.0;
    const double next_value = (t == n - 1) ? bootstrap_value : values[t + 1];
    const double delta = rewards[t] + gamma * next_value * not_done - values[t];
    gae = delta + gamma * lambda * not_done * gae;
    out.advantages[t] = gae;
    out.returns[t] = gae + values[t];
  }
  return out;
}

}  // namespace oodppo
