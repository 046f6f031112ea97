// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oodppo/agent.hpp"
#include "oodppo/config.hpp"
#include "oodppo/optim.hpp"

namespace oodppo {

// Self-describing binary checkpoint: an 8-byte magic, a little-endian u32
// header length, a JSON header (version, config snapshot, array directory,
// RNG state), then the raw float64 payload. Round-trips are byte-exact.
struct Checkpoint {
  static constexpr int kVersion = 1;
  static constexpr char kMagic[9] = "OODPPOC1";

  nlohmann::json config;
  std::vector<std::pair<std::string, Tensor>> arrays;  // ordered directory
  long long adam_t = 0;
  long long obs_count = 0;
  std::array<std::uint64_t, 5> rng_state{};

  const Tensor& array(const std::string& name) const;
  bool has_array(const std::string& name) const;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);

  // Capture everything needed to resume/evaluate a run.
  static Checkpoint capture(const RunConfig& cfg, const Agent& agent, const AdamState& opt,
                            const Rng& rng);

  // Rebuild the agent (and optionally optimizer/rng) stored in this
  // checkpoint. The env is probed for dimensions.
  RunConfig run_config() const;
  Agent restore_agent() const;
  void restore_optimizer(AdamState& opt) const;
  Rng restore_rng() const;
};

}  // namespace oodppo
