// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "oodppo/agent.hpp"
#include "oodppo/envs.hpp"

namespace oodppo {

// Frozen-policy rollouts (no stats updates, no learning).

struct EvalOptions {
  EvalScheme scheme = EvalScheme::scheme_default;
  bool deterministic = true;  // continuous aggregate uses means; single uses argmax/mean
};

struct EpisodeStats {
  std::vector<double> episode_returns;
  std::vector<int> episode_lengths;

  double mean_return() const;
  double std_return() const;
  double mean_length() const;
};

// Run `episodes` complete episodes under the given inference scheme.
EpisodeStats evaluate_policy(const Agent& agent, const std::string& env_id,
                             const EnvParams& params, int episodes, const EvalOptions& opt,
                             std::uint64_t seed);

// Step the policy for exactly `n_steps` env steps (auto-reset) and return
// every visited raw observation, in order.
std::vector<std::vector<double>> rollout_states(const Agent& agent, const std::string& env_id,
                                                const EnvParams& params, int n_steps,
                                                const EvalOptions& opt, std::uint64_t seed);

// Same, but drops the first `burn_in` states of every episode.
std::vector<std::vector<double>> rollout_states_burned(const Agent& agent,
                                                       const std::string& env_id,
                                                       const EnvParams& params, int n_steps,
                                                       int burn_in, const EvalOptions& opt,
                                                       std::uint64_t seed);

}  // namespace oodppo
