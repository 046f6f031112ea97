// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "oodppo/agent.hpp"
#include "oodppo/envs.hpp"
#include "oodppo/optim.hpp"
#include "oodppo/rollout.hpp"

namespace oodppo {

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_range = 0.2;
  double ent_coef = 0.0;
  double vf_coef = 0.5;
  double learning_rate = 3e-4;
  int epochs = 10;
  int minibatch_size = 64;
  int steps_per_env = 128;
  int num_envs = 8;
  double max_grad_norm = 0.5;
  long long total_timesteps = 100000;
  bool obs_normalization = false;
  bool normalize_advantage = true;
  bool linear_lr_decay = false;

  void validate() const;
};

enum class TrainMode { shared_buffer, independent };

std::string train_mode_name(TrainMode m);
TrainMode train_mode_from_name(const std::string& name);

struct Minibatch {
  Tensor obs;                  // [B, obs_dim], already normalized
  std::vector<int> actions_d;  // discrete actions (empty for continuous)
  Tensor actions_c;            // continuous actions [B, n]
  Tensor old_logprob;          // [B, 1]
  Tensor advantages;           // [B, 1], normalized per minibatch
  Tensor returns;              // [B, 1]
  std::vector<int> submodel;   // acting submodel per row

  int size() const { return obs.rows(); }
};

struct PpoLossResult {
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

// Clipped-surrogate PPO loss over one minibatch. logprob_new is evaluated
// under each transition's stored submodel (fixed mask / ensemble member);
// dropout and dropconnect draw a fresh mask from noise_rng. When `grads` is
// non-null it receives d(loss)/d(param) aligned with agent.named_params().
PpoLossResult ppo_loss(Agent& agent, const Minibatch& mb, const PpoConfig& cfg,
                       Rng& noise_rng, std::vector<Tensor>* grads);

// (a - mean) / max(popstd, 1e-8), in place.
void normalize_advantages(Tensor& adv);

// One epoch's minibatch index partition: a shuffled permutation of 0..n-1
// chunked into minibatches (the last one may be short). Every transition
// appears exactly once per epoch.
std::vector<std::vector<int>> epoch_minibatch_indices(int n, int minibatch_size, Rng& rng);

struct CurveRow {
  int iteration = 0;
  long long timesteps = 0;
  double mean_episode_reward = 0.0;
  double mean_episode_len = 0.0;
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

struct TrainReport {
  std::vector<CurveRow> curve;
  std::vector<long long> env_steps_per_submodel;
  std::vector<long long> opt_epochs_per_submodel;
  long long total_env_steps = 0;
};

// On-policy training. Shared mode: one vectorized env set, envs partitioned
// across submodels, one shared buffer, one optimizer. Independent mode
// (ensembles only): each member trains alone on total/k env steps with k x
// epochs, then the members are recombined.
TrainReport train(const std::string& env_id, const EnvParams& params, Agent& agent,
                  const PpoConfig& cfg, TrainMode mode, AdamState& opt, std::uint64_t seed,
                  const std::function<void(const CurveRow&)>& on_row = {});

}  // namespace oodppo
