// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "oodppo/errors.hpp"
#include "oodppo/evaluate.hpp"
#include "oodppo/ood.hpp"
#include "oodppo/roc.hpp"

namespace oodppo {

SweepSample sample_config(const SweepSpace& space, Method method, int num_envs, Rng& rng) {
  if (space.hidden_width.empty() || space.k_choices.empty() || space.epochs.empty())
    throw ConfigError("sweep: empty choice axis");
  SweepSample s;
  s.learning_rate = rng.log_uniform(space.learning_rate.first, space.learning_rate.second);
  s.hidden_width = space.hidden_width[rng.uniform_int(static_cast<int>(space.hidden_width.size()))];
  // Keep only submodel counts the env partition supports.
  std::vector<int> ks;
  for (int k : space.k_choices)
    if (k >= 2 && num_envs % k == 0 && k <= s.hidden_width) ks.push_back(k);
  if (ks.empty()) throw ConfigError("sweep: no feasible k for num_envs");
  s.k = (method == Method::none) ? 1 : ks[rng.uniform_int(static_cast<int>(ks.size()))];
  const double lo = std::max(1.0, space.scale.first);
  const double hi = std::min(static_cast<double>(std::max(s.k, 1)), space.scale.second);
  s.scale = rng.uniform(lo, std::max(lo, hi));
  s.dropout_p = rng.uniform(space.dropout_p.first, space.dropout_p.second);
  s.clip_range = rng.uniform(space.clip_range.first, space.clip_range.second);
  s.ent_coef = rng.log_uniform(space.ent_coef.first, space.ent_coef.second);
  s.gae_lambda = rng.uniform(space.gae_lambda.first, space.gae_lambda.second);
  s.epochs = space.epochs[rng.uniform_int(static_cast<int>(space.epochs.size()))];
  return s;
}

namespace {

bool dominates(const ParetoPoint& a, const ParetoPoint& b) {
  return a.reward >= b.reward && a.auc >= b.auc &&
         (a.reward > b.reward || a.auc > b.auc);
}

}  // namespace

void mark_dominated(std::vector<ParetoPoint>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    points[i].dominated = false;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) continue;
      if (dominates(points[j], points[i])) {
        points[i].dominated = true;
        break;
      }
    }
  }
}

std::vector<ParetoPoint> pareto_front(const std::vector<ParetoPoint>& points) {
  if (points.empty()) throw ConfigError("pareto_front: need at least one point");
  std::vector<ParetoPoint> work = points;
  mark_dominated(work);
  std::vector<ParetoPoint> front;
  for (const auto& p : work)
    if (!p.dominated) front.push_back(p);
  std::stable_sort(front.begin(), front.end(),
                   [](const ParetoPoint& a, const ParetoPoint& b) { return a.reward > b.reward; });
  return front;
}

SweepResult run_sweep(const SweepOptions& opt, std::uint64_t seed) {
  if (opt.n_configs < 1) throw ConfigError("sweep: n_configs must be positive");
  const SweepSpace& space = opt.space;

  std::unique_ptr<Env> probe = make_env(opt.env_id, EnvParams{});
  const int obs_dim = probe->obs_dim();
  const ActionSpace action_space = probe->action_space();

  SweepResult result;
  result.rows.assign(opt.n_configs, SweepRow{});

  auto run_config = [&](int c) {
    // Per-config seed: base seed + config index, as a derived stream.
    const std::uint64_t config_seed = seed + static_cast<std::uint64_t>(c);
    Rng rng = Rng(config_seed).derive(0x73776565ULL);
    SweepRow row;
    row.config_id = c;
    row.sample = sample_config(space, opt.method, opt.base.num_envs, rng);

    AgentConfig acfg;
    acfg.obs_dim = obs_dim;
    acfg.action_space = action_space;
    acfg.hidden = {row.sample.hidden_width, row.sample.hidden_width, row.sample.hidden_width};
    acfg.method = opt.method;
    acfg.k = row.sample.k;
    acfg.scale = row.sample.scale;
    acfg.dropout_p = row.sample.dropout_p;
    acfg.obs_normalization = opt.base.obs_normalization;
    acfg.seed = config_seed;

    PpoConfig ppo = opt.base;
    ppo.learning_rate = row.sample.learning_rate;
    ppo.clip_range = row.sample.clip_range;
    ppo.ent_coef = row.sample.ent_coef;
    ppo.gae_lambda = row.sample.gae_lambda;
    ppo.epochs = row.sample.epochs;
    ppo.total_timesteps = opt.budget_per_config;

    try {
      Agent agent(acfg);
      AdamState adam = AdamState::like(agent.param_ptrs());
      train(opt.env_id, EnvParams{}, agent, ppo, TrainMode::shared_buffer, adam, config_seed);

      EvalOptions eopt;
      EpisodeStats stats = evaluate_policy(agent, opt.env_id, EnvParams{}, opt.eval_episodes,
                                           eopt, config_seed + 101);
      row.reward = stats.mean_return();

      // Noise-proxy OOD set: rollout states vs the same states under
      // uniform noise at 2x the element-wise std.
      const std::vector<std::vector<double>> id_states = rollout_states(
          agent, opt.env_id, EnvParams{}, opt.proxy_id_states, eopt, config_seed + 202);
      Rng attack_rng = Rng(config_seed).derive(0x61747461ULL);
      const AttackSpec attack = AttackSpec::parse("uniform_noise", 2.0, {});
      const std::vector<std::vector<double>> ood_states =
          apply_attack(id_states, attack, agent.obs_stats(), attack_rng);
      UncertaintyOptions uopt;
      const std::vector<double> id_scores =
          measure_scores(agent, id_states, opt.objective, uopt, config_seed + 303);
      const std::vector<double> ood_scores =
          measure_scores(agent, ood_states, opt.objective, uopt, config_seed + 404);
      row.auc = mann_whitney_auc(id_scores, ood_scores);
      row.diverged = false;
    } catch (const DivergenceError&) {
      row.reward = std::nan("");
      row.auc = std::nan("");
      row.diverged = true;
    }
    result.rows[c] = row;
  };

  const int threads = std::max(1, opt.threads);
  if (threads == 1) {
    for (int c = 0; c < opt.n_configs; ++c) run_config(c);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int n = std::min(threads, opt.n_configs);
    pool.reserve(n);
    for (int t = 0; t < n; ++t)
      pool.emplace_back([&] {
        for (int c = next.fetch_add(1); c < opt.n_configs; c = next.fetch_add(1)) run_config(c);
      });
    for (auto& th : pool) th.join();
  }

  std::vector<ParetoPoint> points;
  for (const SweepRow& row : result.rows) {
    if (row.diverged) continue;
    points.push_back({row.config_id, row.reward, row.auc, false});
  }
  if (!points.empty()) {
    mark_dominated(points);
    for (const ParetoPoint& p : points) result.rows[p.config_id].dominated = p.dominated;
    result.front = pareto_front(points);
  }
  return result;
}

}  // namespace oodppo
