// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/ood.hpp"

#include <algorithm>
#include <cmath>

#include "oodppo/errors.hpp"

namespace oodppo {

AttackSpec AttackSpec::parse(const std::string& kind, double level,
                             const std::vector<int>& dims) {
  AttackSpec s;
  s.level = level;
  s.dims = dims;
  if (kind == "none") s.kind = Kind::none;
  else if (kind == "zero_obs") s.kind = Kind::zero_obs;
  else if (kind == "max_obs") s.kind = Kind::max_obs;
  else if (kind == "uniform_noise") s.kind = Kind::uniform_noise;
  else if (kind == "static_mask") s.kind = Kind::static_mask;
  else throw ConfigError("unknown attack kind: " + kind);
  if (s.kind == Kind::uniform_noise && level < 0.0)
    throw ConfigError("attack: noise level must be >= 0");
  if (s.kind == Kind::static_mask && dims.empty())
    throw ConfigError("attack: static_mask needs at least one dimension");
  return s;
}

std::string AttackSpec::name() const {
  switch (kind) {
    case Kind::none: return "none";
    case Kind::zero_obs: return "zero_obs";
    case Kind::max_obs: return "max_obs";
    case Kind::uniform_noise: return "uniform_noise";
    case Kind::static_mask: return "static_mask";
  }
  return "none";
}

void LabeledStateSet::add(std::vector<double> state, bool ood, std::string prov) {
  states.push_back(std::move(state));
  labels.push_back(ood ? 1 : 0);
  provenance.push_back(std::move(prov));
}

int LabeledStateSet::count(bool ood) const {
  int n = 0;
  for (std::uint8_t l : labels) n += (l == 1) == ood;
  return n;
}

std::vector<std::vector<double>> collect_id_states(const Agent& agent, const std::string& env_id,
                                                   const EnvParams& params, int n_steps,
                                                   const EvalOptions& opt, std::uint64_t seed) {
  return rollout_states(agent, env_id, params, n_steps, opt, seed);
}

OodStates collect_ood_states(const Agent& agent, const std::string& env_id,
                             const EnvParams& base, const PerturbationAxes& axes, int n_configs,
                             int steps_per_config, int burn_in, const EvalOptions& opt,
                             std::uint64_t seed) {
  if (n_configs < 1) throw ConfigError("collect_ood_states: n_configs must be positive");
  Rng root(seed);
  Rng sample_rng = root.derive(0x70657274ULL);
  OodStates out;
  for (int c = 0; c < n_configs; ++c) {
    const PerturbationConfig cfg = sample_perturbation(env_id, axes, sample_rng);
    const EnvParams params = apply_perturbation(base, cfg);
    const std::vector<std::vector<double>> states = rollout_states_burned(
        agent, env_id, params, steps_per_config, burn_in, opt,
        root.derive(0x6f6f64ULL, static_cast<std::uint64_t>(c)).base_seed());
    const std::string prov = "config" + std::to_string(c) + ":" + cfg.describe();
    for (const auto& s : states) {
      out.states.push_back(s);
      out.provenance.push_back(prov);
    }
    out.configs.push_back(cfg);
  }
  return out;
}

std::vector<std::vector<double>> apply_attack(const std::vector<std::vector<double>>& states,
                                              const AttackSpec& spec, const RunningStats& stats,
                                              Rng& rng) {
  if (states.empty()) return {};
  const int dim = static_cast<int>(states[0].size());
  if ((spec.kind == AttackSpec::Kind::uniform_noise ||
       spec.kind == AttackSpec::Kind::max_obs) &&
      stats.count == 0)
    throw ConfigError("apply_attack: observation statistics unavailable");

  std::vector<std::vector<double>> out = states;
  switch (spec.kind) {
    case AttackSpec::Kind::none:
      break;
    case AttackSpec::Kind::zero_obs:
      for (auto& s : out) std::fill(s.begin(), s.end(), 0.0);
      break;
    case AttackSpec::Kind::max_obs:
      for (auto& s : out)
        for (int j = 0; j < dim; ++j) s[j] = stats.vmax[j];
      break;
    case AttackSpec::Kind::uniform_noise: {
      const std::vector<double> sd = stats.std();
      for (auto& s : out)
        for (int j = 0; j < dim; ++j) {
          const double a = spec.level * sd[j];
          s[j] += rng.uniform(-a, a);
        }
      break;
    }
    case AttackSpec::Kind::static_mask:
      for (auto& s : out)
        for (int d : spec.dims) {
          if (d < 0 || d >= dim) throw ConfigError("apply_attack: mask dim out of range");
          s[d] = 0.0;
        }
      break;
  }
  return out;
}

std::vector<std::string> applicable_measures(const Agent& agent) {
  if (agent.config().action_space.kind == SpaceKind::discrete)
    return {"value_std", "policy_std", "policy_js", "max_prob", "entropy"};
  return {"value_std", "policy_std", "policy_js"};
}

namespace {

double pick_measure(const UncertaintyReport& r, const std::string& measure) {
  if (measure == "value_std") return r.value_u;
  if (measure == "policy_std") return r.policy_u_std;
  if (measure == "policy_js") return r.policy_u_js;
  if (measure == "max_prob") return r.max_prob_u.value();
  if (measure == "entropy") return r.entropy_u.value();
  throw ConfigError("unknown measure: " + measure);
}

// Per-state uncertainty reports. Fixed-mask methods evaluate the whole batch
// in one forward pass; dropout-style methods evaluate state by state so each
// state sees its own k fresh masks.
std::vector<UncertaintyReport> batch_reports(const Agent& agent,
                                             const std::vector<std::vector<double>>& states,
                                             const UncertaintyOptions& opt, std::uint64_t seed) {
  std::vector<UncertaintyReport> reports;
  reports.reserve(states.size());
  const Method m = agent.config().method;
  Rng root(seed);
  if (m == Method::dropout || m == Method::dropconnect) {
    for (std::size_t i = 0; i < states.size(); ++i) {
      Rng rng = root.derive(static_cast<std::uint64_t>(i));
      const SubmodelBundle b = agent.forward_all(Tensor::row(states[i]), rng);
      reports.push_back(evaluate_uncertainty(b, 0, opt));
    }
    return reports;
  }
  Tensor batch(static_cast<int>(states.size()), static_cast<int>(states[0].size()));
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = 0; j < states[i].size(); ++j)
      batch(static_cast<int>(i), static_cast<int>(j)) = states[i][j];
  Rng rng = root.derive(0);
  const SubmodelBundle b = agent.forward_all(batch, rng);
  return evaluate_uncertainty_batch(b, opt);
}

}  // namespace

std::vector<double> measure_scores(const Agent& agent,
                                   const std::vector<std::vector<double>>& states,
                                   const std::string& measure, const UncertaintyOptions& opt,
                                   std::uint64_t seed) {
  const std::vector<UncertaintyReport> reports = batch_reports(agent, states, opt, seed);
  std::vector<double> out;
  out.reserve(reports.size());
  for (const auto& r : reports) out.push_back(pick_measure(r, measure));
  return out;
}

std::vector<RocResult> score_measures(const Agent& agent, const LabeledStateSet& labeled,
                                      const UncertaintyOptions& opt, std::uint64_t seed) {
  if (labeled.count(false) == 0 || labeled.count(true) == 0)
    throw ConfigError("score_measures: both ID and OOD states required");
  const std::vector<UncertaintyReport> reports =
      batch_reports(agent, labeled.states, opt, seed);
  std::vector<RocResult> out;
  for (const std::string& measure : applicable_measures(agent)) {
    std::vector<double> id_scores, ood_scores;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const double s = pick_measure(reports[i], measure);
      if (labeled.labels[i]) ood_scores.push_back(s); else id_scores.push_back(s);
    }
    out.push_back(roc_curve(measure, id_scores, ood_scores));
  }
  return out;
}

Timeline uncertainty_timeline(const Agent& agent,
                              const std::vector<std::vector<double>>& id_states,
                              const std::vector<std::vector<double>>& ood_states,
                              const UncertaintyOptions& opt, std::uint64_t seed) {
  std::vector<std::vector<double>> all = id_states;
  all.insert(all.end(), ood_states.begin(), ood_states.end());
  Timeline tl;
  tl.boundary = static_cast<int>(id_states.size());
  tl.discrete = agent.config().action_space.kind == SpaceKind::discrete;
  if (all.empty()) return tl;
  const std::vector<UncertaintyReport> reports = batch_reports(agent, all, opt, seed);
  for (std::size_t i = 0; i < reports.size(); ++i)
    tl.points.push_back({static_cast<int>(i), static_cast<int>(i) >= tl.boundary, reports[i]});
  return tl;
}

}  // namespace oodppo
