// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "oodppo/agent.hpp"
#include "oodppo/envs.hpp"
#include "oodppo/evaluate.hpp"
#include "oodppo/roc.hpp"
#include "oodppo/uncertainty.hpp"

namespace oodppo {

// Observation-space attacks (vector analogs of frame replacement / noise).
struct AttackSpec {
  enum class Kind { none, zero_obs, max_obs, uniform_noise, static_mask };
  Kind kind = Kind::none;
  double level = 0.0;      // noise magnitude in units of per-dim std
  std::vector<int> dims;   // static_mask: observation dims to zero

  static AttackSpec parse(const std::string& kind, double level, const std::vector<int>& dims);
  std::string name() const;
};

struct LabeledStateSet {
  std::vector<std::vector<double>> states;
  std::vector<std::uint8_t> labels;         // 0 = ID, 1 = OOD
  std::vector<std::string> provenance;      // perturbation config or attack kind

  void add(std::vector<double> state, bool ood, std::string prov);
  int count(bool ood) const;
};

// ID protocol: execute the trained policy in the unperturbed environment.
std::vector<std::vector<double>> collect_id_states(const Agent& agent, const std::string& env_id,
                                                   const EnvParams& params, int n_steps,
                                                   const EvalOptions& opt, std::uint64_t seed);

struct OodStates {
  std::vector<std::vector<double>> states;
  std::vector<std::string> provenance;
  std::vector<PerturbationConfig> configs;
};

// OOD protocol: sample n_configs perturbations, roll the agent
// steps_per_config steps in each perturbed env, drop the first burn_in
// states of every episode.
OodStates collect_ood_states(const Agent& agent, const std::string& env_id,
                             const EnvParams& base, const PerturbationAxes& axes, int n_configs,
                             int steps_per_config, int burn_in, const EvalOptions& opt,
                             std::uint64_t seed);

std::vector<std::vector<double>> apply_attack(const std::vector<std::vector<double>>& states,
                                              const AttackSpec& spec, const RunningStats& stats,
                                              Rng& rng);

// Score every applicable uncertainty measure over the labeled set.
std::vector<RocResult> score_measures(const Agent& agent, const LabeledStateSet& labeled,
                                      const UncertaintyOptions& opt, std::uint64_t seed);

struct TimelinePoint {
  int step = 0;
  bool ood = false;
  UncertaintyReport report;
};

struct Timeline {
  std::vector<TimelinePoint> points;
  int boundary = 0;  // first OOD index
  bool discrete = false;
};

Timeline uncertainty_timeline(const Agent& agent,
                              const std::vector<std::vector<double>>& id_states,
                              const std::vector<std::vector<double>>& ood_states,
                              const UncertaintyOptions& opt, std::uint64_t seed);

// Per-state scores for one measure name ("value_std", "policy_std",
// "policy_js", "max_prob", "entropy").
std::vector<double> measure_scores(const Agent& agent,
                                   const std::vector<std::vector<double>>& states,
                                   const std::string& measure, const UncertaintyOptions& opt,
                                   std::uint64_t seed);

std::vector<std::string> applicable_measures(const Agent& agent);

}  // namespace oodppo
