// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "oodppo/distributions.hpp"
#include "oodppo/masks.hpp"
#include "oodppo/mlp.hpp"
#include "oodppo/rng.hpp"
#include "oodppo/stats.hpp"
#include "oodppo/tensor.hpp"

namespace oodppo {

enum class Method { none, masksembles, dropout, dropconnect, ensembles };

enum class SpaceKind { discrete, continuous };

struct ActionSpace {
  SpaceKind kind = SpaceKind::discrete;
  int n = 0;  // number of actions, or action dimension
};

using Action = std::variant<int, std::vector<double>>;

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct AgentConfig {
  int obs_dim = 0;
  ActionSpace action_space;
  std::vector<int> hidden = {64, 64, 64};
  Method method = Method::none;
  int k = 1;            // submodel count; 1 iff method == none
  double scale = 2.0;   // masksembles overlap parameter, in [1, k]
  double dropout_p = 0.1;
  bool freeze_log_std = false;
  bool obs_normalization = false;
  std::uint64_t seed = 0;

  void validate() const;
};

// The k per-state policy outputs and value estimates produced by one
// multi-submodel forward pass.
struct SubmodelBundle {
  SpaceKind kind = SpaceKind::discrete;
  int n = 0;
  std::vector<Tensor> policy;    // k tensors of shape [batch, n]
  Tensor values;                 // [k, batch]
  std::vector<double> log_std;   // continuous spaces only (shared vector)
  Method method = Method::none;

  int k() const { return static_cast<int>(policy.size()); }
  int batch() const { return policy.empty() ? 0 : policy[0].rows(); }
  Categorical categorical(int submodel, int row) const;
  DiagGaussian gaussian(int submodel, int row) const;
  std::vector<double> state_values(int row) const;  // k values for one state
};

struct ActionDecision {
  Action action;
  double logprob = 0.0;
  double value = 0.0;
  int submodel = 0;  // acting submodel, or -1 for aggregate schemes
};

// Stable env -> submodel partition: env_index / (num_envs / k).
int submodel_for_env(int env_index, int num_envs, int k);

// Policy and value networks with one of the multi-sample mechanisms wired
// after the first and second hidden layers. Parameters are plain tensors;
// all stochasticity is drawn from caller-provided Rng streams.
class Agent {
 public:
  explicit Agent(AgentConfig cfg);

  const AgentConfig& config() const { return cfg_; }
  int num_submodels() const { return cfg_.k; }

  RunningStats& obs_stats() { return obs_stats_; }
  const RunningStats& obs_stats() const { return obs_stats_; }

  // Named parameter tensors in a stable order (checkpoint + optimizer).
  struct NamedParam {
    std::string name;
    Tensor* tensor;
  };
  std::vector<NamedParam> named_params();
  std::vector<Tensor*> param_ptrs();

  // Nets and masks, exposed for the training loop.
  int num_nets() const { return static_cast<int>(policy_nets_.size()); }
  const Mlp& policy_net(int member = 0) const { return policy_nets_[member]; }
  const Mlp& value_net(int member = 0) const { return value_nets_[member]; }
  Mlp& mutable_policy_net(int member = 0) { return policy_nets_[member]; }
  Mlp& mutable_value_net(int member = 0) { return value_nets_[member]; }
  const Tensor& log_std() const { return log_std_; }
  Tensor& mutable_log_std() { return log_std_; }
  const std::vector<MaskSet>& policy_masks() const { return policy_masks_; }
  const std::vector<MaskSet>& value_masks() const { return value_masks_; }
  std::vector<MaskSet>& mutable_policy_masks() { return policy_masks_; }
  std::vector<MaskSet>& mutable_value_masks() { return value_masks_; }

  // Fixed per-submodel noise (none/masksembles/ensembles -> deterministic;
  // dropout/dropconnect -> fresh sample from rng).
  LayerNoise submodel_noise(bool value_net, int submodel, Rng& rng) const;

  // Which net index serves a submodel (ensembles: the member; else net 0).
  int net_for_submodel(int submodel) const;

  std::vector<double> normalize(const std::vector<double>& raw_obs) const;
  Tensor normalize_batch(const Tensor& raw_states) const;

  // One forward pass producing all k submodel outputs. States are raw
  // observations; normalization is applied internally.
  SubmodelBundle forward_all(const Tensor& raw_states, Rng& rng) const;

  // Training-time action selection: the env's fixed submodel acts.
  ActionDecision act_training(const std::vector<double>& raw_obs, int env_index,
                              int num_envs, Rng& rng) const;

  // Bootstrap value of a state under a given submodel.
  double submodel_value(const std::vector<double>& raw_obs, int submodel, Rng& rng) const;

 private:
  AgentConfig cfg_;
  std::vector<Mlp> policy_nets_;  // 1 net, or k for ensembles
  std::vector<Mlp> value_nets_;
  Tensor log_std_;  // [1, n] for continuous spaces
  std::vector<MaskSet> policy_masks_;  // masksembles: one per stochastic layer
  std::vector<MaskSet> value_masks_;
  RunningStats obs_stats_;
};

// Inference schemes over one state (row) of a bundle.
int act_vote(const SubmodelBundle& b, int row, Rng& tie_rng);
std::vector<double> act_gaussian_aggregate(const SubmodelBundle& b, int row,
                                           bool deterministic, Rng& rng);
Action act_single(const SubmodelBundle& b, int row, int submodel, bool deterministic,
                  Rng& rng);  // submodel = -1 picks uniformly at random
int act_avg_then_sample(const SubmodelBundle& b, int row, Rng& rng);

// Aggregate Gaussian parameters: elementwise mean of submodel means and the
// shared sigma combined in quadrature with the spread of the means.
DiagGaussian aggregate_gaussian(const SubmodelBundle& b, int row);

enum class EvalScheme { scheme_default, vote, avg_then_sample, aggregate, single };

std::string scheme_name(EvalScheme s);
EvalScheme scheme_from_name(const std::string& name);

// Default evaluation action: voting for discrete spaces, deterministic
// aggregate mean for continuous ones.
Action act_eval(const SubmodelBundle& b, int row, EvalScheme scheme, bool deterministic,
                Rng& rng, Rng& tie_rng);

}  // namespace oodppo
