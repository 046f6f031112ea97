// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oodppo/errors.hpp"
#include "oodppo/tape.hpp"

namespace oodppo {

void PpoConfig::validate() const {
  if (gamma <= 0.0 || gamma > 1.0) throw ConfigError("ppo: gamma must lie in (0, 1]");
  if (gae_lambda < 0.0 || gae_lambda > 1.0) throw ConfigError("ppo: gae_lambda must lie in [0, 1]");
  if (clip_range <= 0.0) throw ConfigError("ppo: clip_range must be positive");
  if (learning_rate <= 0.0) throw ConfigError("ppo: learning_rate must be positive");
  if (epochs < 1) throw ConfigError("ppo: epochs must be positive");
  if (minibatch_size < 1) throw ConfigError("ppo: minibatch_size must be positive");
  if (steps_per_env < 1) throw ConfigError("ppo: steps_per_env must be positive");
  if (num_envs < 1) throw ConfigError("ppo: num_envs must be positive");
  if (max_grad_norm <= 0.0) throw ConfigError("ppo: max_grad_norm must be positive");
  if (total_timesteps < 0) throw ConfigError("ppo: total_timesteps must be non-negative");
  if (vf_coef < 0.0 || ent_coef < 0.0) throw ConfigError("ppo: loss coefficients must be >= 0");
}

std::string train_mode_name(TrainMode m) {
  return m == TrainMode::shared_buffer ? "shared_buffer" : "independent";
}

TrainMode train_mode_from_name(const std::string& name) {
  if (name == "shared_buffer") return TrainMode::shared_buffer;
  if (name == "independent") return TrainMode::independent;
  throw ConfigError("unknown training mode: " + name);
}

void normalize_advantages(Tensor& adv) {
  std::vector<double> xs(adv.data(), adv.data() + adv.size());
  const double m = pop_mean(xs);
  const double s = std::max(pop_std(xs), 1e-8);
  for (std::size_t i = 0; i < adv.size(); ++i) adv[i] = (adv[i] - m) / s;
}

std::vector<std::vector<int>> epoch_minibatch_indices(int n, int minibatch_size, Rng& rng) {
  if (n < 1 || minibatch_size < 1)
    throw ConfigError("epoch_minibatch_indices: sizes must be positive");
  std::vector<int> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(indices[i], indices[rng.uniform_int(i + 1)]);
  std::vector<std::vector<int>> out;
  for (int start = 0; start < n; start += minibatch_size) {
    const int end = std::min(start + minibatch_size, n);
    out.emplace_back(indices.begin() + start, indices.begin() + end);
  }
  return out;
}

PpoLossResult ppo_loss(Agent& agent, const Minibatch& mb, const PpoConfig& cfg,
                       Rng& noise_rng, std::vector<Tensor>* grads) {
  const AgentConfig& acfg = agent.config();
  const bool discrete = acfg.action_space.kind == SpaceKind::discrete;
  const int batch = mb.size();
  if (batch < 1) throw ConfigError("ppo_loss: empty minibatch");

  Tape tape;
  // Register parameters in named_params() order so gradients align.
  std::vector<Tape::NodeId> leaves;
  std::vector<MlpNodes> policy_nodes(agent.num_nets()), value_nodes(agent.num_nets());
  Tape::NodeId log_std_node = -1;
  {
    auto named = agent.named_params();
    std::size_t idx = 0;
    for (int m = 0; m < agent.num_nets(); ++m) {
      MlpNodes nodes;
      for (int l = 0; l < agent.policy_net(m).num_layers(); ++l) {
        nodes.weights.push_back(tape.input(*named[idx++].tensor, true));
        nodes.biases.push_back(tape.input(*named[idx++].tensor, true));
      }
      policy_nodes[m] = nodes;
    }
    if (!discrete) {
      log_std_node = tape.input(*named[idx++].tensor, !acfg.freeze_log_std);
    }
    for (int m = 0; m < agent.num_nets(); ++m) {
      MlpNodes nodes;
      for (int l = 0; l < agent.value_net(m).num_layers(); ++l) {
        nodes.weights.push_back(tape.input(*named[idx++].tensor, true));
        nodes.biases.push_back(tape.input(*named[idx++].tensor, true));
      }
      value_nodes[m] = nodes;
    }
    for (Tape::NodeId id = 0; id < static_cast<Tape::NodeId>(idx); ++id) leaves.push_back(id);
  }

  const Tape::NodeId x = tape.input(mb.obs, false);

  // Per-row policy/value outputs under each transition's own submodel.
  Tape::NodeId policy_out = -1;
  Tape::NodeId value_out = -1;
  const Method method = acfg.method;
  if (method == Method::none || method == Method::dropout || method == Method::dropconnect) {
    // One stochastic (or plain) pass; dropout-style methods use a fresh mask.
    const LayerNoise pn = agent.submodel_noise(false, 0, noise_rng);
    const LayerNoise vn = agent.submodel_noise(true, 0, noise_rng);
    policy_out = mlp_forward(tape, policy_nodes[0], x, pn);
    value_out = mlp_forward(tape, value_nodes[0], x, vn);
  } else {
    std::vector<Tape::NodeId> per_policy, per_value;
    for (int i = 0; i < acfg.k; ++i) {
      const int net = agent.net_for_submodel(i);
      const LayerNoise pn = agent.submodel_noise(false, i, noise_rng);
      const LayerNoise vn = agent.submodel_noise(true, i, noise_rng);
      per_policy.push_back(mlp_forward(tape, policy_nodes[net], x, pn));
      per_value.push_back(mlp_forward(tape, value_nodes[net], x, vn));
    }
    policy_out = tape.select_rows(per_policy, mb.submodel);
    value_out = tape.select_rows(per_value, mb.submodel);
  }

  Tape::NodeId logprob_new = -1;
  Tape::NodeId entropy_node = -1;
  if (discrete) {
    logprob_new = tape.categorical_logprob(policy_out, mb.actions_d);
    entropy_node = tape.mean_all(tape.categorical_entropy(policy_out));
  } else {
    logprob_new = tape.gaussian_logprob(policy_out, log_std_node, mb.actions_c);
    // Gaussian entropy depends only on the shared log-std.
    constexpr double kLogTwoPiPlusOne = 2.8378770664093454835606594728112;
    entropy_node = tape.add_const(tape.sum_all(log_std_node),
                                  0.5 * acfg.action_space.n * kLogTwoPiPlusOne);
  }

  const Tape::NodeId ratio = tape.exp_(tape.axpy_const(logprob_new, mb.old_logprob, -1.0));
  const Tape::NodeId surr1 = tape.mul_const(ratio, mb.advantages);
  const Tape::NodeId surr2 = tape.mul_const(
      tape.clamp(ratio, 1.0 - cfg.clip_range, 1.0 + cfg.clip_range), mb.advantages);
  const Tape::NodeId policy_loss = tape.scale(tape.mean_all(tape.minimum(surr1, surr2)), -1.0);

  const Tape::NodeId value_err = tape.axpy_const(value_out, mb.returns, -1.0);
  const Tape::NodeId value_loss = tape.mean_all(tape.square(value_err));

  const Tape::NodeId loss =
      tape.add(tape.add(policy_loss, tape.scale(value_loss, cfg.vf_coef)),
               tape.scale(entropy_node, -cfg.ent_coef));

  PpoLossResult out;
  out.loss = tape.value(loss).item();
  out.policy_loss = tape.value(policy_loss).item();
  out.value_loss = tape.value(value_loss).item();
  out.entropy = tape.value(entropy_node).item();
  if (!std::isfinite(out.loss))
    throw DivergenceError("ppo_loss: non-finite loss (policy=" + std::to_string(out.policy_loss) +
                          " value=" + std::to_string(out.value_loss) + ")");
  if (grads) *grads = tape.gradients(loss, leaves);
  return out;
}

namespace {

struct IterationStats {
  double reward_sum = 0.0;
  double len_sum = 0.0;
  int episodes = 0;
  PpoLossResult loss_acc;
  int loss_count = 0;
};

Minibatch build_minibatch(const RolloutBuffer& buffer, const std::vector<int>& idx,
                          bool discrete, int obs_dim, int act_dim, bool norm_adv) {
  const int b = static_cast<int>(idx.size());
  Minibatch mb;
  mb.obs = Tensor(b, obs_dim);
  mb.old_logprob = Tensor(b, 1);
  mb.advantages = Tensor(b, 1);
  mb.returns = Tensor(b, 1);
  mb.submodel.resize(b);
  if (discrete) {
    mb.actions_d.resize(b);
  } else {
    mb.actions_c = Tensor(b, act_dim);
  }
  for (int r = 0; r < b; ++r) {
    const Transition& t = buffer.flat_at(idx[r]);
    for (int j = 0; j < obs_dim; ++j) mb.obs(r, j) = t.obs[j];
    mb.old_logprob(r, 0) = t.logprob;
    mb.advantages(r, 0) = buffer.flat_advantage(idx[r]);
    mb.returns(r, 0) = buffer.flat_return(idx[r]);
    mb.submodel[r] = t.submodel;
    if (discrete) {
      mb.actions_d[r] = std::get<int>(t.action);
    } else {
      const auto& a = std::get<std::vector<double>>(t.action);
      for (int j = 0; j < act_dim; ++j) mb.actions_c(r, j) = a[j];
    }
  }
  if (norm_adv) normalize_advantages(mb.advantages);
  return mb;
}

void merge_stats(RunningStats& into, const RunningStats& other) {
  if (other.count == 0) return;
  if (into.count == 0) {
    into = other;
    return;
  }
  const double na = static_cast<double>(into.count);
  const double nb = static_cast<double>(other.count);
  const double n = na + nb;
  for (int j = 0; j < into.dim(); ++j) {
    const double delta = other.mean[j] - into.mean[j];
    into.mean[j] += delta * nb / n;
    into.m2[j] += other.m2[j] + delta * delta * na * nb / n;
    into.vmin[j] = std::min(into.vmin[j], other.vmin[j]);
    into.vmax[j] = std::max(into.vmax[j], other.vmax[j]);
  }
  into.count += other.count;
}

TrainReport train_shared(const std::string& env_id, const EnvParams& params, Agent& agent,
                         const PpoConfig& cfg, AdamState& opt, std::uint64_t seed,
                         const std::function<void(const CurveRow&)>& on_row) {
  const AgentConfig& acfg = agent.config();
  const bool discrete = acfg.action_space.kind == SpaceKind::discrete;
  const int k = acfg.k;
  if (cfg.num_envs % k != 0)
    throw ConfigError("train: num_envs must be divisible by the submodel count");

  TrainReport report;
  report.env_steps_per_submodel.assign(k, 0);
  report.opt_epochs_per_submodel.assign(k, 0);

  const long long steps_per_iter =
      static_cast<long long>(cfg.num_envs) * cfg.steps_per_env;
  const long long iterations = cfg.total_timesteps / steps_per_iter;

  Rng root(seed);
  Rng act_rng = root.derive(0x616374ULL);      // action sampling + dropout noise
  Rng shuffle_rng = root.derive(0x73687566ULL);
  Rng loss_rng = root.derive(0x6c6f7373ULL);   // loss-time dropout masks

  VecEnv vec(env_id, params, cfg.num_envs, root.derive(0x76656376ULL).base_seed());
  std::vector<std::vector<double>> raw_obs = vec.reset_all();

  std::vector<Tensor*> param_ptrs = agent.param_ptrs();
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.learning_rate;

  for (long long iter = 1; iter <= iterations; ++iter) {
    if (cfg.linear_lr_decay)
      adam_cfg.lr = cfg.learning_rate *
                    (1.0 - static_cast<double>(iter - 1) / static_cast<double>(iterations));

    IterationStats stats;
    RolloutBuffer buffer(cfg.num_envs, cfg.steps_per_env);
    for (int step = 0; step < cfg.steps_per_env; ++step) {
      std::vector<Action> actions(cfg.num_envs);
      std::vector<Transition> pending(cfg.num_envs);
      for (int e = 0; e < cfg.num_envs; ++e) {
        agent.obs_stats().update(raw_obs[e]);
        ActionDecision d = agent.act_training(raw_obs[e], e, cfg.num_envs, act_rng);
        Transition t;
        t.obs = agent.normalize(raw_obs[e]);
        t.action = d.action;
        t.value = d.value;
        t.logprob = d.logprob;
        t.submodel = d.submodel;
        t.env = e;
        actions[e] = d.action;
        pending[e] = std::move(t);
        ++report.env_steps_per_submodel[d.submodel];
      }
      VecEnv::VecStep sr = vec.step(actions);
      for (int e = 0; e < cfg.num_envs; ++e) {
        pending[e].reward = sr.rewards[e];
        pending[e].done = sr.dones[e] != 0;
        buffer.store(e, step, std::move(pending[e]));
      }
      for (const auto& [ep_ret, ep_len] : sr.finished) {
        stats.reward_sum += ep_ret;
        stats.len_sum += ep_len;
        ++stats.episodes;
      }
      raw_obs = sr.obs;
    }
    report.total_env_steps += steps_per_iter;

    for (int e = 0; e < cfg.num_envs; ++e) {
      const int sub = submodel_for_env(e, cfg.num_envs, k);
      buffer.set_bootstrap(e, agent.submodel_value(raw_obs[e], sub, act_rng));
    }
    buffer.compute_advantages(cfg.gamma, cfg.gae_lambda);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      for (const std::vector<int>& idx :
           epoch_minibatch_indices(buffer.capacity(), cfg.minibatch_size, shuffle_rng)) {
        Minibatch mb = build_minibatch(buffer, idx, discrete, acfg.obs_dim,
                                       acfg.action_space.n, cfg.normalize_advantage);
        std::vector<Tensor> grads;
        PpoLossResult r = ppo_loss(agent, mb, cfg, loss_rng, &grads);
        clip_global_norm(grads, cfg.max_grad_norm);
        adam_step(param_ptrs, grads, opt, adam_cfg);
        stats.loss_acc.loss += r.loss;
        stats.loss_acc.policy_loss += r.policy_loss;
        stats.loss_acc.value_loss += r.value_loss;
        stats.loss_acc.entropy += r.entropy;
        ++stats.loss_count;
      }
      for (int i = 0; i < k; ++i) ++report.opt_epochs_per_submodel[i];
    }

    CurveRow row;
    row.iteration = static_cast<int>(iter);
    row.timesteps = report.total_env_steps;
    row.mean_episode_reward =
        stats.episodes > 0 ? stats.reward_sum / stats.episodes : std::nan("");
    row.mean_episode_len = stats.episodes > 0 ? stats.len_sum / stats.episodes : std::nan("");
    const double n = std::max(stats.loss_count, 1);
    row.loss = stats.loss_acc.loss / n;
    row.policy_loss = stats.loss_acc.policy_loss / n;
    row.value_loss = stats.loss_acc.value_loss / n;
    row.entropy = stats.loss_acc.entropy / n;
    report.curve.push_back(row);
    if (on_row) on_row(row);
  }
  return report;
}

}  // namespace

TrainReport train(const std::string& env_id, const EnvParams& params, Agent& agent,
                  const PpoConfig& cfg, TrainMode mode, AdamState& opt, std::uint64_t seed,
                  const std::function<void(const CurveRow&)>& on_row) {
  cfg.validate();
  if (mode == TrainMode::shared_buffer)
    return train_shared(env_id, params, agent, cfg, opt, seed, on_row);

  // Independent mode: each ensemble member is trained alone on 1/k of the
  // interaction budget with k-times the optimization epochs, then members
  // are recombined. Observation statistics are merged across members.
  const AgentConfig& acfg = agent.config();
  if (acfg.method != Method::ensembles)
    throw ConfigError("train: independent mode applies to ensembles only");
  const int k = acfg.k;

  TrainReport report;
  report.env_steps_per_submodel.assign(k, 0);
  report.opt_epochs_per_submodel.assign(k, 0);

  RunningStats merged(acfg.obs_dim);
  Tensor log_std_sum;
  if (acfg.action_space.kind == SpaceKind::continuous)
    log_std_sum = Tensor::zeros(1, acfg.action_space.n);
  for (int member = 0; member < k; ++member) {
    AgentConfig solo_cfg = acfg;
    solo_cfg.method = Method::none;
    solo_cfg.k = 1;
    solo_cfg.seed = acfg.seed;
    Agent solo(solo_cfg);
    // Start from the member's own initialization.
    for (int l = 0; l < solo.policy_net().num_layers(); ++l) {
      solo.mutable_policy_net().weights[l] = agent.policy_net(member).weights[l];
      solo.mutable_policy_net().biases[l] = agent.policy_net(member).biases[l];
      solo.mutable_value_net().weights[l] = agent.value_net(member).weights[l];
      solo.mutable_value_net().biases[l] = agent.value_net(member).biases[l];
    }
    if (acfg.action_space.kind == SpaceKind::continuous)
      solo.mutable_log_std() = agent.log_std();

    PpoConfig solo_ppo = cfg;
    solo_ppo.total_timesteps = cfg.total_timesteps / k;
    solo_ppo.epochs = cfg.epochs * k;

    AdamState solo_opt = AdamState::like(solo.param_ptrs());
    TrainReport solo_report =
        train_shared(env_id, params, solo, solo_ppo, solo_opt,
                     Rng(seed).derive(0x696e64ULL, static_cast<std::uint64_t>(member)).base_seed(),
                     member == 0 ? on_row : std::function<void(const CurveRow&)>{});

    report.env_steps_per_submodel[member] = solo_report.total_env_steps;
    report.opt_epochs_per_submodel[member] =
        solo_report.opt_epochs_per_submodel.empty() ? 0
                                                    : solo_report.opt_epochs_per_submodel[0];
    report.total_env_steps += solo_report.total_env_steps;
    if (member == 0) report.curve = solo_report.curve;

    for (int l = 0; l < solo.policy_net().num_layers(); ++l) {
      agent.mutable_policy_net(member).weights[l] = solo.policy_net().weights[l];
      agent.mutable_policy_net(member).biases[l] = solo.policy_net().biases[l];
      agent.mutable_value_net(member).weights[l] = solo.value_net().weights[l];
      agent.mutable_value_net(member).biases[l] = solo.value_net().biases[l];
    }
    if (acfg.action_space.kind == SpaceKind::continuous)
      axpy(log_std_sum, solo.log_std(), 1.0 / k);
    merge_stats(merged, solo.obs_stats());
  }
  if (acfg.action_space.kind == SpaceKind::continuous)
    agent.mutable_log_std() = log_std_sum;
  agent.obs_stats() = merged;
  return report;
}

}  // namespace oodppo
