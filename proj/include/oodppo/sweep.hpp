// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "oodppo/agent.hpp"
#include "oodppo/ppo.hpp"

namespace oodppo {

// Random-search space for the two-objective sweep. Ranges are sampled
// uniformly (log-uniformly where noted); list axes are sampled by choice.
struct SweepSpace {
  std::pair<double, double> learning_rate = {1e-5, 1e-2};  // log-uniform
  std::vector<int> hidden_width = {32, 64};
  std::vector<int> k_choices = {2, 4, 8};
  std::pair<double, double> scale = {1.0, 4.0};  // masksembles; clamped to [1, k]
  std::pair<double, double> dropout_p = {0.05, 0.5};
  std::pair<double, double> clip_range = {0.1, 0.3};
  std::pair<double, double> ent_coef = {1e-8, 1e-2};  // log-uniform
  std::pair<double, double> gae_lambda = {0.8, 1.0};
  std::vector<int> epochs = {4, 10};
};

struct SweepSample {
  double learning_rate = 0;
  int hidden_width = 0;
  int k = 0;
  double scale = 0;
  double dropout_p = 0;
  double clip_range = 0;
  double ent_coef = 0;
  double gae_lambda = 0;
  int epochs = 0;
};

// Samples always satisfy downstream preconditions (num_envs divisible by k,
// hidden width >= k, scale in [1, k]).
SweepSample sample_config(const SweepSpace& space, Method method, int num_envs, Rng& rng);

struct ParetoPoint {
  int config_id = 0;
  double reward = 0.0;
  double auc = 0.0;
  bool dominated = false;
};

// Exact dominance filter, both objectives maximized; result sorted by
// reward, best first. Input `dominated` flags are ignored.
std::vector<ParetoPoint> pareto_front(const std::vector<ParetoPoint>& points);

// Marks each point's dominated flag in place.
void mark_dominated(std::vector<ParetoPoint>& points);

struct SweepRow {
  int config_id = 0;
  SweepSample sample;
  double reward = 0.0;  // NaN sentinel for diverged runs
  double auc = 0.0;
  bool dominated = true;
  bool diverged = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<ParetoPoint> front;
};

struct SweepOptions {
  Method method = Method::masksembles;
  std::string env_id = "bandit2";
  int n_configs = 20;
  long long budget_per_config = 50000;
  std::string objective = "value_std";  // or "policy_std"
  int eval_episodes = 10;
  int proxy_id_states = 512;
  SweepSpace space;
  PpoConfig base;   // epochs/lr/etc. overridden per sample
  int threads = 1;  // worker pool; per-config seeds keep outputs identical
};

// For each sampled config: train, evaluate reward, score the noise-proxy
// OOD AUC (observations + uniform noise at 2x the per-dim std), then filter
// the Pareto front. Deterministic for a fixed seed regardless of threads.
SweepResult run_sweep(const SweepOptions& opt, std::uint64_t seed);

}  // namespace oodppo
