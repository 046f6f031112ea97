// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "oodppo/agent.hpp"
#include "oodppo/ood.hpp"
#include "oodppo/ppo.hpp"
#include "oodppo/sweep.hpp"

namespace oodppo {

struct EvalConfig {
  int episodes = 10;
  int seeds = 3;
  std::string scheme = "default";
  bool deterministic = true;
};

struct BenchConfig {
  int n_id_steps = 2000;
  int n_ood_configs = 50;
  int steps_per_config = 100;
  int burn_in = 10;
  std::string attack_kind = "none";
  double attack_level = 0.0;
  std::vector<int> attack_dims;
  std::vector<std::string> perturb_axes = {"gravity", "wind", "friction", "body_scale"};
  bool cat_std_on_probs = false;
};

struct SweepConfig {
  int n_configs = 20;
  long long budget_per_config = 50000;
  std::string objective = "value_std";
  int eval_episodes = 10;
  int proxy_id_states = 512;
  SweepSpace space;
};

// One strictly-validated run description; unknown keys are rejected.
struct RunConfig {
  std::string env = "pointmass";
  Method method = Method::none;
  std::uint64_t seed = 0;
  std::string checkpoint;  // input checkpoint for eval / oodbench

  // agent
  std::vector<int> hidden = {64, 64, 64};
  int k = 1;
  double scale = 2.0;
  double dropout_p = 0.1;
  bool freeze_log_std = false;

  PpoConfig ppo;
  TrainMode mode = TrainMode::shared_buffer;
  EvalConfig eval;
  BenchConfig bench;
  SweepConfig sweep;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
  nlohmann::json to_json() const;

  // Full AgentConfig for this run's environment.
  AgentConfig agent_config(int obs_dim, const ActionSpace& space) const;
  void validate() const;
};

}  // namespace oodppo
