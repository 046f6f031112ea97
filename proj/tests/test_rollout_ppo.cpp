// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "oodppo/errors.hpp"
#include "oodppo/ppo.hpp"
#include "oodppo/rollout.hpp"
#include "oodppo/stats.hpp"

using namespace oodppo;

namespace {

// Brute-force GAE: A_t = sum_l (gamma*lambda)^l delta_{t+l}, truncated at the
// first done at or after t (and at the rollout end).
std::vector<double> gae_brute_force(const std::vector<double>& rewards,
                                    const std::vector<double>& values,
                                    const std::vector<std::uint8_t>& dones, double bootstrap,
                                    double gamma, double lambda) {
  const int n = static_cast<int>(rewards.size());
  std::vector<double> adv(n, 0.0);
  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    double w = 1.0;
    for (int l = 0; t + l < n; ++l) {
      const int s = t + l;
      const double next_v = (s == n - 1) ? bootstrap : values[s + 1];
      const double not_done = dones[s] ? 0.0 : 1.0;
      const double delta = rewards[s] + gamma * next_v * not_done - values[s];
      acc += w * delta;
      if (dones[s]) break;
      w *= gamma * lambda;
    }
    adv[t] = acc;
  }
  return adv;
}

}  // namespace

TEST_CASE("gae closed cases") {
  {
    std::vector<double> r(8, 0.0), v(8, 0.0);
    std::vector<std::uint8_t> d(8, 0);
    GaeResult g = compute_gae(r, v, d, 0.0, 0.99, 0.95);
    for (double a : g.advantages) CHECK(a == 0.0);
  }
  {
    GaeResult g = compute_gae({1.0}, {0.0}, {1}, 123.0, 0.9, 0.95);
    CHECK(g.advantages[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.returns[0] == doctest::Approx(1.0).epsilon(1e-15));
  }
  {
    Rng rng(2);
    std::vector<double> r(16), v(16);
    std::vector<std::uint8_t> d(16, 0);
    for (int i = 0; i < 16; ++i) {
      r[i] = rng.uniform(-1, 1);
      v[i] = rng.uniform(-1, 1);
      d[i] = rng.uniform() < 0.2 ? 1 : 0;
    }
    const double bootstrap = rng.uniform(-1, 1);
    GaeResult g = compute_gae(r, v, d, bootstrap, 0.97, 0.9);
    const std::vector<double> oracle = gae_brute_force(r, v, d, bootstrap, 0.97, 0.9);
    for (int i = 0; i < 16; ++i) CHECK(std::abs(g.advantages[i] - oracle[i]) <= 1e-10);
  }
}

TEST_CASE("gae equals brute force on random trajectories") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + rng.uniform_int(64);
    std::vector<double> r(n), v(n);
    std::vector<std::uint8_t> d(n, 0);
    for (int i = 0; i < n; ++i) {
      r[i] = rng.uniform(-2, 2);
      v[i] = rng.uniform(-2, 2);
      d[i] = rng.uniform() < 0.15 ? 1 : 0;
    }
    const double gamma = rng.uniform(0.01, 1.0);
    const double lambda = rng.uniform(0.0, 1.0);
    const double bootstrap = rng.uniform(-2, 2);
    GaeResult g = compute_gae(r, v, d, bootstrap, gamma, lambda);
    const std::vector<double> oracle = gae_brute_force(r, v, d, bootstrap, gamma, lambda);
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(g.advantages[i] - oracle[i]) <= 1e-10);
      CHECK(g.returns[i] == g.advantages[i] + v[i]);
    }
  }
}

TEST_CASE("gae at lambda=1, gamma=1, zero values is exact reward-to-go") {
  Rng rng(14);
  const int n = 32;
  std::vector<double> r(n), v(n, 0.0);
  std::vector<std::uint8_t> d(n, 0);
  for (int i = 0; i < n; ++i) r[i] = rng.uniform(-3, 3);
  GaeResult g = compute_gae(r, v, d, 0.0, 1.0, 1.0);
  std::vector<double> rtg(n, 0.0);
  for (int t = n - 1; t >= 0; --t) rtg[t] = r[t] + (t + 1 < n ? rtg[t + 1] : 0.0);
  for (int i = 0; i < n; ++i) CHECK(g.advantages[i] == rtg[i]);
}

TEST_CASE("rollout buffer bootstrap contract") {
  RolloutBuffer buf(2, 4);
  for (int e = 0; e < 2; ++e)
    for (int s = 0; s < 4; ++s) {
      Transition t;
      t.obs = {0.0};
      t.action = 0;
      t.reward = 1.0;
      t.value = 0.0;
      t.logprob = -0.5;
      buf.store(e, s, t);
    }
  CHECK_THROWS_AS(buf.compute_advantages(0.99, 0.95), ConfigError);
  buf.set_bootstrap(0, 0.0);
  buf.set_bootstrap(1, 0.0);
  buf.compute_advantages(0.99, 0.95);
  CHECK(buf.advantages_ready());
}

TEST_CASE("epoch minibatch partition touches every index exactly once") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + rng.uniform_int(200);
    const int mb = 1 + rng.uniform_int(64);
    const auto batches = epoch_minibatch_indices(n, mb, rng);
    std::set<int> seen;
    int total = 0;
    for (const auto& batch : batches) {
      CHECK(static_cast<int>(batch.size()) <= mb);
      for (int idx : batch) {
        CHECK(seen.insert(idx).second);
        ++total;
      }
    }
    CHECK(total == n);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == n - 1);
  }
}

TEST_CASE("advantage normalization meets the buffer invariant") {
  Rng rng(8);
  Tensor adv(64, 1);
  for (std::size_t i = 0; i < adv.size(); ++i) adv[i] = rng.uniform(-5, 5);
  normalize_advantages(adv);
  std::vector<double> xs(adv.data(), adv.data() + adv.size());
  CHECK(std::abs(pop_mean(xs)) <= 1e-6);
  CHECK(std::abs(pop_std(xs) - 1.0) <= 1e-6);
}

namespace {

AgentConfig tiny_discrete_agent() {
  AgentConfig cfg;
  cfg.obs_dim = 2;
  cfg.action_space = {SpaceKind::discrete, 3};
  cfg.hidden = {8, 8, 8};
  cfg.method = Method::none;
  cfg.k = 1;
  cfg.seed = 31;
  return cfg;
}

// Minibatch whose old_logprob equals the agent's own current logprob.
Minibatch self_consistent_minibatch(Agent& agent, const std::vector<double>& advantages) {
  const int b = static_cast<int>(advantages.size());
  Minibatch mb;
  mb.obs = Tensor(b, agent.config().obs_dim);
  Rng rng(77);
  for (std::size_t i = 0; i < mb.obs.size(); ++i) mb.obs[i] = rng.uniform(-1, 1);
  mb.actions_d.resize(b);
  mb.old_logprob = Tensor(b, 1);
  mb.advantages = Tensor(b, 1);
  mb.returns = Tensor(b, 1);
  mb.submodel.assign(b, 0);
  const Tensor logits = mlp_forward(agent.policy_net(), mb.obs);
  const Tensor values = mlp_forward(agent.value_net(), mb.obs);
  for (int r = 0; r < b; ++r) {
    Categorical c;
    c.logits.assign(logits.data() + r * logits.cols(), logits.data() + (r + 1) * logits.cols());
    mb.actions_d[r] = r % 3;
    mb.old_logprob(r, 0) = c.logprob(mb.actions_d[r]);
    mb.advantages(r, 0) = advantages[r];
    mb.returns(r, 0) = values(r, 0);  // zero value error
  }
  return mb;
}

}  // namespace

TEST_CASE("ppo loss at unchanged parameters") {
  Agent agent(tiny_discrete_agent());
  const std::vector<double> adv = {1.0, -0.5, 2.0, 0.25};
  Minibatch mb = self_consistent_minibatch(agent, adv);
  PpoConfig cfg;
  cfg.clip_range = 0.2;
  cfg.vf_coef = 0.0;
  cfg.ent_coef = 0.0;
  Rng noise(1);
  PpoLossResult r = ppo_loss(agent, mb, cfg, noise, nullptr);
  // ratio == 1 for every row, so the policy term is -mean(advantages).
  double mean_adv = 0;
  for (double a : adv) mean_adv += a / adv.size();
  CHECK(r.policy_loss == doctest::Approx(-mean_adv).epsilon(1e-12));
  CHECK(r.loss == doctest::Approx(r.policy_loss).epsilon(1e-12));
  CHECK(r.value_loss == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ppo clipping arithmetic") {
  Agent agent(tiny_discrete_agent());
  Minibatch mb = self_consistent_minibatch(agent, {1.0});
  // Shift the stored logprob so the ratio becomes exactly exp(ln 2) = 2.
  mb.old_logprob(0, 0) -= std::log(2.0);
  PpoConfig cfg;
  cfg.clip_range = 0.2;
  cfg.vf_coef = 0.0;
  cfg.ent_coef = 0.0;
  Rng noise(1);
  PpoLossResult r = ppo_loss(agent, mb, cfg, noise, nullptr);
  // min(2 * 1, clip(2, 0.8, 1.2) * 1) = 1.2, negated by the loss sign.
  CHECK(r.policy_loss == doctest::Approx(-1.2).epsilon(1e-12));
}

TEST_CASE("ppo loss term isolation") {
  Agent agent(tiny_discrete_agent());
  Minibatch mb = self_consistent_minibatch(agent, {0.5, -1.0, 1.5, 2.0});
  // Introduce a value error so the vf term is non-zero.
  for (int r = 0; r < mb.returns.rows(); ++r) mb.returns(r, 0) += 1.0;
  PpoConfig cfg;
  cfg.clip_range = 0.2;
  Rng noise(1);

  cfg.vf_coef = 0.0;
  cfg.ent_coef = 0.0;
  PpoLossResult bare = ppo_loss(agent, mb, cfg, noise, nullptr);
  CHECK(bare.loss == doctest::Approx(bare.policy_loss).epsilon(1e-12));

  cfg.vf_coef = 0.7;
  cfg.ent_coef = 0.01;
  PpoLossResult full = ppo_loss(agent, mb, cfg, noise, nullptr);
  CHECK(full.loss == doctest::Approx(full.policy_loss + 0.7 * full.value_loss -
                                     0.01 * full.entropy)
                         .epsilon(1e-12));
  CHECK(full.value_loss == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ppo loss gradients are finite and shaped like the params") {
  Agent agent(tiny_discrete_agent());
  Minibatch mb = self_consistent_minibatch(agent, {1.0, -1.0, 0.5, 0.2});
  PpoConfig cfg;
  Rng noise(1);
  std::vector<Tensor> grads;
  ppo_loss(agent, mb, cfg, noise, &grads);
  auto params = agent.named_params();
  REQUIRE(grads.size() == params.size());
  for (std::size_t i = 0; i < grads.size(); ++i) {
    CHECK(grads[i].same_shape(*params[i].tensor));
    CHECK(all_finite(grads[i]));
  }
}

TEST_CASE("freeze_log_std keeps the shared sigma at its initialization") {
  AgentConfig acfg;
  acfg.obs_dim = 4;
  acfg.action_space = {SpaceKind::continuous, 2};
  acfg.hidden = {8, 8, 8};
  acfg.method = Method::none;
  acfg.k = 1;
  acfg.seed = 2;
  acfg.freeze_log_std = true;
  Agent agent(acfg);
  PpoConfig cfg;
  cfg.num_envs = 4;
  cfg.steps_per_env = 16;
  cfg.minibatch_size = 32;
  cfg.epochs = 2;
  cfg.total_timesteps = 512;
  AdamState opt = AdamState::like(agent.param_ptrs());
  train("pointmass", EnvParams{}, agent, cfg, TrainMode::shared_buffer, opt, 3);
  for (int j = 0; j < agent.log_std().cols(); ++j) CHECK(agent.log_std()(0, j) == 0.0);

  // Unfrozen control: sigma moves.
  acfg.freeze_log_std = false;
  Agent agent2(acfg);
  AdamState opt2 = AdamState::like(agent2.param_ptrs());
  train("pointmass", EnvParams{}, agent2, cfg, TrainMode::shared_buffer, opt2, 3);
  bool moved = false;
  for (int j = 0; j < agent2.log_std().cols(); ++j)
    moved = moved || agent2.log_std()(0, j) != 0.0;
  CHECK(moved);
}

TEST_CASE("non-finite loss aborts with a divergence error") {
  Agent agent(tiny_discrete_agent());
  // Blow up the policy head so logits overflow into inf/nan.
  for (auto& np : agent.named_params())
    for (std::size_t j = 0; j < np.tensor->size(); ++j) (*np.tensor)[j] = 1e308;
  Minibatch mb;
  mb.obs = Tensor::from(1, 2, {1.0, 1.0});
  mb.actions_d = {0};
  mb.old_logprob = Tensor::scalar(-1.0);
  mb.advantages = Tensor::scalar(1.0);
  mb.returns = Tensor::scalar(0.0);
  mb.submodel = {0};
  PpoConfig cfg;
  Rng noise(1);
  CHECK_THROWS_AS(ppo_loss(agent, mb, cfg, noise, nullptr), DivergenceError);
}

TEST_CASE("observation normalization contract") {
  RunningStats stats(3);
  const std::vector<double> first = {5.0, -2.0, 0.5};
  stats.update(first);
  const std::vector<double> out = stats.normalize(first);
  for (double v : out) CHECK(v == 0.0);

  // A constant stream keeps normalizing to zero.
  for (int i = 0; i < 100; ++i) stats.update(first);
  const std::vector<double> out2 = stats.normalize(first);
  for (double v : out2) CHECK(v == 0.0);

  // Gaussian stream: normalized std converges to 1.
  RunningStats s2(1);
  Rng rng(3);
  std::vector<double> normalized;
  for (int i = 0; i < 10000; ++i) {
    const std::vector<double> x = {5.0 + 2.0 * rng.normal()};
    s2.update(x);
    normalized.push_back(s2.normalize(x)[0]);
  }
  // Drop the early transient where stats are still warming up.
  std::vector<double> tail(normalized.begin() + 1000, normalized.end());
  CHECK(std::abs(pop_std(tail) - 1.0) <= 0.05);
}

TEST_CASE("training with zero budget leaves the agent unchanged") {
  AgentConfig acfg = tiny_discrete_agent();
  Agent agent(acfg);
  Agent reference(acfg);
  PpoConfig cfg;
  cfg.total_timesteps = 0;
  cfg.num_envs = 4;
  cfg.steps_per_env = 8;
  AdamState opt = AdamState::like(agent.param_ptrs());
  TrainReport report = train("bandit2", EnvParams{}, agent, cfg, TrainMode::shared_buffer, opt, 1);
  CHECK(report.curve.empty());
  CHECK(report.total_env_steps == 0);
  auto a = agent.named_params();
  auto b = reference.named_params();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].tensor->size(); ++j)
      CHECK((*a[i].tensor)[j] == (*b[i].tensor)[j]);
}

TEST_CASE("same seed training runs are bit-identical") {
  auto run = [] {
    AgentConfig acfg;
    acfg.obs_dim = 1;
    acfg.action_space = {SpaceKind::discrete, 2};
    acfg.hidden = {8, 8, 8};
    acfg.method = Method::masksembles;
    acfg.k = 2;
    acfg.scale = 2.0;
    acfg.seed = 9;
    Agent agent(acfg);
    PpoConfig cfg;
    cfg.num_envs = 4;
    cfg.steps_per_env = 16;
    cfg.minibatch_size = 16;
    cfg.epochs = 2;
    cfg.total_timesteps = 512;
    AdamState opt = AdamState::like(agent.param_ptrs());
    train("bandit2", EnvParams{}, agent, cfg, TrainMode::shared_buffer, opt, 42);
    std::vector<double> flat;
    for (auto& np : agent.named_params())
      flat.insert(flat.end(), np.tensor->data(), np.tensor->data() + np.tensor->size());
    return flat;
  };
  const std::vector<double> a = run();
  const std::vector<double> b = run();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("independent ensemble training budget accounting") {
  AgentConfig acfg;
  acfg.obs_dim = 1;
  acfg.action_space = {SpaceKind::discrete, 2};
  acfg.hidden = {8, 8, 8};
  acfg.method = Method::ensembles;
  acfg.k = 4;
  acfg.seed = 12;
  Agent agent(acfg);
  PpoConfig cfg;
  cfg.num_envs = 4;
  cfg.steps_per_env = 25;
  cfg.minibatch_size = 25;
  cfg.epochs = 2;
  cfg.total_timesteps = 4000;
  AdamState opt = AdamState::like(agent.param_ptrs());
  TrainReport report =
      train("bandit2", EnvParams{}, agent, cfg, TrainMode::independent, opt, 5);
  REQUIRE(report.env_steps_per_submodel.size() == 4);
  for (long long steps : report.env_steps_per_submodel) CHECK(steps == 1000);
  // Epochs are multiplied by k for each member.
  for (long long epochs : report.opt_epochs_per_submodel)
    CHECK(epochs == 10 * (2 * 4));  // 10 iterations x (epochs * k)
  CHECK(report.total_env_steps == 4000);
}

TEST_CASE("independent mode rejects non-ensemble methods") {
  AgentConfig acfg = tiny_discrete_agent();
  Agent agent(acfg);
  PpoConfig cfg;
  AdamState opt = AdamState::like(agent.param_ptrs());
  CHECK_THROWS_AS(train("bandit2", EnvParams{}, agent, cfg, TrainMode::independent, opt, 1),
                  ConfigError);
}

TEST_CASE("bandit training trend improves for most seeds") {
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    AgentConfig acfg;
    acfg.obs_dim = 1;
    acfg.action_space = {SpaceKind::discrete, 2};
    acfg.hidden = {8, 8};
    acfg.method = Method::none;
    acfg.k = 1;
    acfg.seed = seed;
    Agent agent(acfg);
    PpoConfig cfg;
    cfg.num_envs = 4;
    cfg.steps_per_env = 32;
    cfg.minibatch_size = 64;
    cfg.epochs = 4;
    cfg.learning_rate = 3e-3;
    cfg.total_timesteps = 4096 * 3;
    AdamState opt = AdamState::like(agent.param_ptrs());
    TrainReport report =
        train("bandit2", EnvParams{}, agent, cfg, TrainMode::shared_buffer, opt, seed);
    REQUIRE(report.curve.size() >= 20);
    double first = 0, last = 0;
    for (int i = 0; i < 10; ++i) {
      first += report.curve[i].mean_episode_reward / 10;
      last += report.curve[report.curve.size() - 10 + i].mean_episode_reward / 10;
    }
    if (last > first) ++improved;
  }
  CHECK(improved >= 4);
}
