// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "oodppo/agent.hpp"

namespace oodppo {

// One environment transition with submodel provenance.
struct Transition {
  std::vector<double> obs;  // observation as fed to the nets (post-normalization)
  Action action;
  double reward = 0.0;
  bool done = false;
  double value = 0.0;    // V(s_t) from the acting submodel
  double logprob = 0.0;  // under the sampling distribution
  int submodel = 0;
  int env = 0;
};

// Shared rollout buffer laid out [env][step]. All submodels write their
// experience here; optimization consumes the full mixed buffer.
class RolloutBuffer {
 public:
  RolloutBuffer(int num_envs, int steps_per_env);

  int num_envs() const { return num_envs_; }
  int steps_per_env() const { return steps_per_env_; }
  int capacity() const { return num_envs_ * steps_per_env_; }

  void store(int env, int step, Transition t);
  const Transition& at(int env, int step) const { return data_[flat(env, step)]; }
  const Transition& flat_at(int i) const { return data_[i]; }

  void set_bootstrap(int env, double value) { bootstrap_[env] = value; }

  // GAE over every env stream; fills advantages and returns.
  void compute_advantages(double gamma, double lambda);

  double advantage(int env, int step) const { return advantages_[flat(env, step)]; }
  double return_at(int env, int step) const { return returns_[flat(env, step)]; }
  double flat_advantage(int i) const { return advantages_[i]; }
  double flat_return(int i) const { return returns_[i]; }
  bool advantages_ready() const { return advantages_ready_; }

 private:
  int flat(int env, int step) const { return env * steps_per_env_ + step; }

  int num_envs_;
  int steps_per_env_;
  std::vector<Transition> data_;
  std::vector<double> bootstrap_;
  std::vector<double> advantages_;
  std::vector<double> returns_;
  bool advantages_ready_ = false;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// delta_t = r_t + gamma * V(s_{t+1}) * (1 - done_t) - V(s_t)
// A_t = sum_{l>=0} (gamma*lambda)^l delta_{t+l}, truncated at episode ends
// and at the rollout boundary (bootstrapped with `bootstrap_value`).
GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<std::uint8_t>& dones, double bootstrap_value,
                      double gamma, double lambda);

}  // namespace oodppo
