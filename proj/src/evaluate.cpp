// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/evaluate.hpp"

#include <cmath>

#include "oodppo/errors.hpp"
#include "oodppo/tensor.hpp"

namespace oodppo {

double EpisodeStats::mean_return() const {
  return episode_returns.empty() ? std::nan("") : pop_mean(episode_returns);
}

double EpisodeStats::std_return() const {
  return episode_returns.empty() ? std::nan("") : pop_std(episode_returns);
}

double EpisodeStats::mean_length() const {
  if (episode_lengths.empty()) return std::nan("");
  double s = 0;
  for (int l : episode_lengths) s += l;
  return s / static_cast<double>(episode_lengths.size());
}

namespace {

Action select_action(const Agent& agent, const std::vector<double>& raw_obs,
                     const EvalOptions& opt, Rng& noise_rng, Rng& act_rng, Rng& tie_rng) {
  const SubmodelBundle bundle = agent.forward_all(Tensor::row(raw_obs), noise_rng);
  return act_eval(bundle, 0, opt.scheme, opt.deterministic, act_rng, tie_rng);
}

}  // namespace

EpisodeStats evaluate_policy(const Agent& agent, const std::string& env_id,
                             const EnvParams& params, int episodes, const EvalOptions& opt,
                             std::uint64_t seed) {
  if (episodes < 1) throw ConfigError("evaluate_policy: episodes must be positive");
  Rng root(seed);
  Rng env_rng = root.derive(0x65767231ULL);
  Rng noise_rng = root.derive(0x6e6f6973ULL);
  Rng act_rng = root.derive(0x61637432ULL);
  Rng tie_rng = root.derive(0x74696572ULL);  // separate stream for vote ties

  std::unique_ptr<Env> env = make_env(env_id, params);
  EpisodeStats stats;
  for (int ep = 0; ep < episodes; ++ep) {
    std::vector<double> obs = env->reset(env_rng);
    double ret = 0.0;
    int len = 0;
    while (true) {
      const Action a = select_action(agent, obs, opt, noise_rng, act_rng, tie_rng);
      StepResult r = env->step(a);
      ret += r.reward;
      ++len;
      if (r.done) break;
      obs = std::move(r.obs);
    }
    stats.episode_returns.push_back(ret);
    stats.episode_lengths.push_back(len);
  }
  return stats;
}

std::vector<std::vector<double>> rollout_states_burned(const Agent& agent,
                                                       const std::string& env_id,
                                                       const EnvParams& params, int n_steps,
                                                       int burn_in, const EvalOptions& opt,
                                                       std::uint64_t seed) {
  if (n_steps < 0) throw ConfigError("rollout_states: n_steps must be >= 0");
  Rng root(seed);
  Rng env_rng = root.derive(0x65767231ULL);
  Rng noise_rng = root.derive(0x6e6f6973ULL);
  Rng act_rng = root.derive(0x61637432ULL);
  Rng tie_rng = root.derive(0x74696572ULL);

  std::unique_ptr<Env> env = make_env(env_id, params);
  std::vector<std::vector<double>> states;
  states.reserve(n_steps);
  std::vector<double> obs = env->reset(env_rng);
  int ep_step = 0;
  for (int t = 0; t < n_steps; ++t) {
    if (ep_step >= burn_in) states.push_back(obs);
    const Action a = select_action(agent, obs, opt, noise_rng, act_rng, tie_rng);
    StepResult r = env->step(a);
    ++ep_step;
    if (r.done) {
      obs = env->reset(env_rng);
      ep_step = 0;
    } else {
      obs = std::move(r.obs);
    }
  }
  return states;
}

std::vector<std::vector<double>> rollout_states(const Agent& agent, const std::string& env_id,
                                                const EnvParams& params, int n_steps,
                                                const EvalOptions& opt, std::uint64_t seed) {
  return rollout_states_burned(agent, env_id, params, n_steps, 0, opt, seed);
}

}  // namespace oodppo
