// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oodppo/errors.hpp"
#include "oodppo/sweep.hpp"

using namespace oodppo;

namespace {

// Quadratic brute-force dominance filter.
std::vector<bool> brute_force_dominated(const std::vector<ParetoPoint>& pts) {
  std::vector<bool> dom(pts.size(), false);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      const bool geq = pts[j].reward >= pts[i].reward && pts[j].auc >= pts[i].auc;
      const bool strict = pts[j].reward > pts[i].reward || pts[j].auc > pts[i].auc;
      if (geq && strict) {
        dom[i] = true;
        break;
      }
    }
  return dom;
}

}  // namespace

TEST_CASE("pareto front hand cases") {
  std::vector<ParetoPoint> pts = {{0, 1.0, 0.5, false}, {1, 0.5, 1.0, false}, {2, 0.4, 0.4, false}};
  const std::vector<ParetoPoint> front = pareto_front(pts);
  REQUIRE(front.size() == 2);
  CHECK(front[0].reward == 1.0);  // sorted by reward, best first
  CHECK(front[1].reward == 0.5);

  // Identical points are all non-dominated.
  std::vector<ParetoPoint> same(4, ParetoPoint{0, 0.3, 0.3, false});
  for (int i = 0; i < 4; ++i) same[i].config_id = i;
  CHECK(pareto_front(same).size() == 4);

  CHECK_THROWS_AS(pareto_front({}), ConfigError);
}

TEST_CASE("pareto front equals brute force on random points") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ParetoPoint> pts;
    for (int i = 0; i < 200; ++i)
      pts.push_back({i, std::round(rng.uniform(0, 1) * 20) / 20,
                     std::round(rng.uniform(0, 1) * 20) / 20, false});
    const std::vector<bool> oracle = brute_force_dominated(pts);
    std::vector<ParetoPoint> marked = pts;
    mark_dominated(marked);
    std::size_t front_size = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(marked[i].dominated == oracle[i]);
      if (!oracle[i]) ++front_size;
    }
    CHECK(pareto_front(pts).size() == front_size);

    // Every non-front point is dominated by some front point.
    const std::vector<ParetoPoint> front = pareto_front(pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!oracle[i]) continue;
      bool covered = false;
      for (const ParetoPoint& f : front) {
        const bool geq = f.reward >= pts[i].reward && f.auc >= pts[i].auc;
        const bool strict = f.reward > pts[i].reward || f.auc > pts[i].auc;
        if (geq && strict) {
          covered = true;
          break;
        }
      }
      CHECK(covered);
    }
  }
}

TEST_CASE("front is invariant to ordering and duplication") {
  Rng rng(32);
  std::vector<ParetoPoint> pts;
  for (int i = 0; i < 40; ++i) pts.push_back({i, rng.uniform(0, 1), rng.uniform(0, 1), false});
  auto front1 = pareto_front(pts);
  std::vector<ParetoPoint> shuffled = pts;
  for (int i = 39; i > 0; --i) std::swap(shuffled[i], shuffled[rng.uniform_int(i + 1)]);
  auto front2 = pareto_front(shuffled);
  REQUIRE(front1.size() == front2.size());
  for (std::size_t i = 0; i < front1.size(); ++i) {
    CHECK(front1[i].reward == front2[i].reward);
    CHECK(front1[i].auc == front2[i].auc);
  }
  // Duplicating a non-dominated point only adds its copy to the front.
  std::vector<ParetoPoint> dup = pts;
  dup.push_back(front1[0]);
  CHECK(pareto_front(dup).size() == front1.size() + 1);
}

TEST_CASE("config sampling respects preconditions") {
  SweepSpace space;
  Rng rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const SweepSample s = sample_config(space, Method::masksembles, 8, rng);
    CHECK(8 % s.k == 0);
    CHECK(s.k >= 2);
    CHECK(s.scale >= 1.0);
    CHECK(s.scale <= static_cast<double>(s.k));
    CHECK(s.hidden_width >= s.k);
    CHECK(s.learning_rate >= 1e-5);
    CHECK(s.learning_rate <= 1e-2);
    CHECK(s.gae_lambda >= 0.8);
    CHECK(s.gae_lambda <= 1.0);
  }
}

namespace {

SweepOptions tiny_sweep(int n_configs) {
  SweepOptions opt;
  opt.method = Method::masksembles;
  opt.env_id = "bandit2";
  opt.n_configs = n_configs;
  opt.budget_per_config = 768;
  opt.eval_episodes = 4;
  opt.proxy_id_states = 64;
  opt.base.num_envs = 4;
  opt.base.steps_per_env = 32;
  opt.base.minibatch_size = 32;
  opt.base.total_timesteps = 768;
  opt.space.hidden_width = {8, 16};
  opt.space.k_choices = {2, 4};
  opt.space.epochs = {2};
  return opt;
}

}  // namespace

TEST_CASE("single-config sweep is trivially non-dominated") {
  const SweepResult r = run_sweep(tiny_sweep(1), 5);
  REQUIRE(r.rows.size() == 1);
  CHECK(!r.rows[0].dominated);
  REQUIRE(r.front.size() == 1);
  CHECK(r.front[0].config_id == 0);
}

TEST_CASE("sweep smoke run emits one row per config") {
  const SweepResult r = run_sweep(tiny_sweep(3), 7);
  CHECK(r.rows.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(r.rows[i].config_id == i);
    CHECK(!r.rows[i].diverged);
    CHECK(std::isfinite(r.rows[i].reward));
    CHECK(r.rows[i].auc >= 0.0);
    CHECK(r.rows[i].auc <= 1.0);
  }
  CHECK(!r.front.empty());
  // Front members are marked non-dominated in the rows.
  for (const ParetoPoint& p : r.front) CHECK(!r.rows[p.config_id].dominated);
}

TEST_CASE("twenty-config bandit sweep reaches the env optimum") {
  SweepOptions opt;
  opt.method = Method::masksembles;
  opt.env_id = "bandit2";
  opt.n_configs = 20;
  opt.budget_per_config = 4096;
  opt.eval_episodes = 10;
  opt.proxy_id_states = 128;
  opt.base.num_envs = 8;
  opt.base.steps_per_env = 32;
  opt.base.minibatch_size = 64;
  opt.space.hidden_width = {16, 32};
  opt.space.epochs = {4, 10};
  const SweepResult r = run_sweep(opt, 2026);
  CHECK(r.rows.size() == 20);  // divergence sentinels would still count
  double best = -1e300;
  for (const SweepRow& row : r.rows)
    if (!row.diverged) best = std::max(best, row.reward);
  CHECK(best >= 0.9);
}

TEST_CASE("sweep is deterministic and thread-count independent") {
  SweepOptions opt = tiny_sweep(4);
  const SweepResult serial = run_sweep(opt, 11);
  const SweepResult serial2 = run_sweep(opt, 11);
  opt.threads = 2;
  const SweepResult parallel = run_sweep(opt, 11);
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].reward == serial2.rows[i].reward);
    CHECK(serial.rows[i].reward == parallel.rows[i].reward);
    CHECK(serial.rows[i].auc == parallel.rows[i].auc);
    CHECK(serial.rows[i].sample.learning_rate == parallel.rows[i].sample.learning_rate);
  }
}
