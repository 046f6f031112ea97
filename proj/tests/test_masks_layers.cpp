// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oodppo/agent.hpp"
#include "oodppo/errors.hpp"
#include "oodppo/masks.hpp"
#include "oodppo/tensor.hpp"

using namespace oodppo;

TEST_CASE("mask generation extremes") {
  // scale = k with width divisible by k: pairwise disjoint, width/k ones.
  MaskSet disjoint = generate_masks(4, 8, 4.0, 1);
  CHECK(disjoint.ones_per_mask() == 2);
  for (int i = 0; i < 4; ++i) {
    int ones = 0;
    for (int c = 0; c < 8; ++c) ones += disjoint.masks[i][c];
    CHECK(ones == 2);
    for (int j = i + 1; j < 4; ++j) CHECK(disjoint.overlap(i, j) == 0);
  }

  // scale = 1: all masks identical all-ones.
  MaskSet full = generate_masks(4, 8, 1.0, 1);
  CHECK(full.ones_per_mask() == 8);
  for (int i = 0; i < 4; ++i)
    for (int c = 0; c < 8; ++c) CHECK(full.masks[i][c] == 1);
}

TEST_CASE("mask generation mid-scale example") {
  // k=4, width=12, scale=2: m = round(48/10) = 5.
  MaskSet set = generate_masks(4, 12, 2.0, 7);
  CHECK(mask_ones_count(4, 12, 2.0) == 5);
  int min_ov = 1 << 20, max_ov = 0;
  for (int i = 0; i < 4; ++i) {
    int ones = 0;
    for (int c = 0; c < 12; ++c) ones += set.masks[i][c];
    CHECK(ones == 5);
    for (int j = i + 1; j < 4; ++j) {
      min_ov = std::min(min_ov, set.overlap(i, j));
      max_ov = std::max(max_ov, set.overlap(i, j));
    }
  }
  CHECK(max_ov - min_ov <= 1);
}

TEST_CASE("mask invariants over the full grid") {
  for (int k : {2, 4, 8}) {
    for (int width : {8, 16, 64}) {
      for (int s = 1; s <= k; ++s) {
        const double scale = static_cast<double>(s);
        MaskSet set = generate_masks(k, width, scale, 99 + k + width + s);
        const int m = mask_ones_count(k, width, scale);
        int min_ov = 1 << 20, max_ov = 0;
        for (int i = 0; i < k; ++i) {
          int ones = 0;
          for (int c = 0; c < width; ++c) ones += set.masks[i][c];
          REQUIRE(ones == m);
          for (int j = i + 1; j < k; ++j) {
            min_ov = std::min(min_ov, set.overlap(i, j));
            max_ov = std::max(max_ov, set.overlap(i, j));
          }
        }
        CHECK(max_ov - min_ov <= 1);
        if (s == 1) {
          for (int i = 0; i < k; ++i)
            for (int c = 0; c < width; ++c) REQUIRE(set.masks[i][c] == 1);
        }
        if (s == k && width % k == 0) CHECK(max_ov == 0);
        // Seed determinism.
        MaskSet again = generate_masks(k, width, scale, 99 + k + width + s);
        CHECK(again.masks == set.masks);
        // Different seeds permute channels but keep counts.
        MaskSet other = generate_masks(k, width, scale, 1234567 + k + width + s);
        CHECK(other.ones_per_mask() == m);
      }
    }
  }
}

TEST_CASE("mask generation rejects infeasible configs") {
  CHECK_THROWS_AS(generate_masks(1, 8, 1.0, 0), ConfigError);
  CHECK_THROWS_AS(generate_masks(4, 3, 2.0, 0), ConfigError);
  CHECK_THROWS_AS(generate_masks(4, 8, 0.5, 0), ConfigError);
  CHECK_THROWS_AS(generate_masks(4, 8, 5.0, 0), ConfigError);
}

namespace {

AgentConfig base_config(Method method, int k) {
  AgentConfig cfg;
  cfg.obs_dim = 3;
  cfg.action_space = {SpaceKind::discrete, 4};
  cfg.hidden = {16, 16, 16};
  cfg.method = method;
  cfg.k = k;
  cfg.scale = 2.0;
  cfg.dropout_p = 0.25;
  cfg.seed = 77;
  return cfg;
}

// Copies all parameters from one agent to another (shapes must match).
void copy_params(Agent& from, Agent& to) {
  auto src = from.named_params();
  auto dst = to.named_params();
  REQUIRE(src.size() == dst.size());
  for (std::size_t i = 0; i < src.size(); ++i) *dst[i].tensor = *src[i].tensor;
}

}  // namespace

TEST_CASE("baseline equivalence of degenerate stochastic configs") {
  Agent baseline(base_config(Method::none, 1));
  Tensor x(5, 3);
  Rng xr(4);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = xr.uniform(-1, 1);
  const Tensor ref_policy = mlp_forward(baseline.policy_net(), x);
  const Tensor ref_value = mlp_forward(baseline.value_net(), x);

  for (int k : {2, 4}) {
    // Dropout p = 0.
    AgentConfig d = base_config(Method::dropout, k);
    d.dropout_p = 0.0;
    Agent dropout_agent(d);
    copy_params(baseline, dropout_agent);
    Rng rng(1);
    SubmodelBundle bundle = dropout_agent.forward_all(x, rng);
    for (int i = 0; i < k; ++i)
      for (std::size_t e = 0; e < ref_policy.size(); ++e)
        CHECK(std::abs(bundle.policy[i][e] - ref_policy[e]) <= 1e-12);
    for (int i = 0; i < k; ++i)
      for (int b = 0; b < 5; ++b)
        CHECK(std::abs(bundle.values(i, b) - ref_value(b, 0)) <= 1e-12);

    // Dropconnect p = 0.
    AgentConfig dc = base_config(Method::dropconnect, k);
    dc.dropout_p = 0.0;
    Agent dropconnect_agent(dc);
    copy_params(baseline, dropconnect_agent);
    SubmodelBundle bundle_dc = dropconnect_agent.forward_all(x, rng);
    for (int i = 0; i < k; ++i)
      for (std::size_t e = 0; e < ref_policy.size(); ++e)
        CHECK(std::abs(bundle_dc.policy[i][e] - ref_policy[e]) <= 1e-12);

    // Masksembles s = 1.
    AgentConfig ms = base_config(Method::masksembles, k);
    ms.scale = 1.0;
    Agent masks_agent(ms);
    copy_params(baseline, masks_agent);
    SubmodelBundle bundle_ms = masks_agent.forward_all(x, rng);
    for (int i = 0; i < k; ++i)
      for (std::size_t e = 0; e < ref_policy.size(); ++e)
        CHECK(std::abs(bundle_ms.policy[i][e] - ref_policy[e]) <= 1e-12);
  }
}

TEST_CASE("masksembles submodels use their own masks") {
  AgentConfig cfg = base_config(Method::masksembles, 4);
  cfg.scale = 4.0;  // disjoint masks: strongest disagreement
  Agent agent(cfg);
  Tensor x(1, 3);
  x[0] = 0.4; x[1] = -0.2; x[2] = 0.9;
  Rng rng(2);
  SubmodelBundle b = agent.forward_all(x, rng);
  // Repeated calls are deterministic (fixed masks).
  SubmodelBundle b2 = agent.forward_all(x, rng);
  for (int i = 0; i < 4; ++i)
    for (std::size_t e = 0; e < b.policy[i].size(); ++e)
      CHECK(b.policy[i][e] == b2.policy[i][e]);
  // Not all submodels agree.
  bool any_diff = false;
  for (int i = 1; i < 4 && !any_diff; ++i)
    for (std::size_t e = 0; e < b.policy[0].size(); ++e)
      if (b.policy[i][e] != b.policy[0][e]) { any_diff = true; break; }
  CHECK(any_diff);
}

TEST_CASE("ensembles produce distinct member outputs") {
  AgentConfig cfg = base_config(Method::ensembles, 4);
  Agent agent(cfg);
  Tensor x(1, 3);
  x[0] = 0.1; x[1] = 0.2; x[2] = 0.3;
  Rng rng(3);
  SubmodelBundle b = agent.forward_all(x, rng);
  std::vector<double> values = b.state_values(0);
  // Direct evaluation of the 4 independent nets is the oracle.
  for (int i = 0; i < 4; ++i) {
    const Tensor v = mlp_forward(agent.value_net(i), x);
    CHECK(b.values(i, 0) == v(0, 0));
  }
  double mean = 0;
  for (double v : values) mean += v / 4;
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean);
  CHECK(var > 0.0);
}

TEST_CASE("inverted dropout keeps the expected activation") {
  // Mean over many sampled masks converges to the p=0 output, per element.
  AgentConfig cfg = base_config(Method::dropout, 4);
  cfg.dropout_p = 0.3;
  Agent agent(cfg);
  Rng rng(11);
  const int width = 16;
  Tensor fixed(1, width);
  for (int j = 0; j < width; ++j) fixed(0, j) = 0.5 + 0.1 * j;

  const int samples = 100000;
  std::vector<double> acc(width, 0.0);
  for (int s = 0; s < samples; ++s) {
    LayerNoise noise = agent.submodel_noise(false, 0, rng);
    const Tensor& mult = noise.unit_mult[0];
    for (int j = 0; j < width; ++j) acc[j] += fixed(0, j) * mult(0, j);
  }
  const double p = 0.3;
  for (int j = 0; j < width; ++j) {
    const double mean = acc[j] / samples;
    const double expect = fixed(0, j);
    // std of x*Bern(1-p)/(1-p) is |x|*sqrt(p/(1-p)).
    const double se = std::abs(expect) * std::sqrt(p / (1 - p)) / std::sqrt(samples);
    CHECK(std::abs(mean - expect) <= 3.0 * se);
  }
}

TEST_CASE("env partition is stable and checked") {
  CHECK(submodel_for_env(0, 8, 4) == 0);
  CHECK(submodel_for_env(1, 8, 4) == 0);
  CHECK(submodel_for_env(7, 8, 4) == 3);
  CHECK(submodel_for_env(5, 8, 1) == 0);
  CHECK(submodel_for_env(3, 6, 2) == 1);
  CHECK_THROWS_AS(submodel_for_env(0, 6, 4), ConfigError);
  CHECK_THROWS_AS(submodel_for_env(8, 8, 4), ConfigError);
}
