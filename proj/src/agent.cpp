// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/agent.hpp"

#include <algorithm>
#include <cmath>

#include "oodppo/errors.hpp"

namespace oodppo {

std::string method_name(Method m) {
  switch (m) {
    case Method::none: return "none";
    case Method::masksembles: return "masksembles";
    case Method::dropout: return "dropout";
    case Method::dropconnect: return "dropconnect";
    case Method::ensembles: return "ensembles";
  }
  return "none";
}

Method method_from_name(const std::string& name) {
  if (name == "none") return Method::none;
  if (name == "masksembles") return Method::masksembles;
  if (name == "dropout") return Method::dropout;
  if (name == "dropconnect") return Method::dropconnect;
  if (name == "ensembles") return Method::ensembles;
  throw ConfigError("unknown method: " + name);
}

void AgentConfig::validate() const {
  if (obs_dim < 1) throw ConfigError("agent: obs_dim must be positive");
  if (action_space.n < 1) throw ConfigError("agent: action space size must be positive");
  if (hidden.empty()) throw ConfigError("agent: at least one hidden layer required");
  if (method == Method::none) {
    if (k != 1) throw ConfigError("agent: k must be 1 for method none");
  } else {
    if (k < 2) throw ConfigError("agent: k must be >= 2 for multi-sample methods");
    if (hidden.size() < 2)
      throw ConfigError("agent: multi-sample methods need at least two hidden layers");
  }
  if (method == Method::masksembles) {
    if (scale < 1.0 || scale > static_cast<double>(k))
      throw ConfigError("agent: masksembles scale must lie in [1, k]");
    for (int l = 0; l < 2; ++l)
      if (hidden[l] < k) throw ConfigError("agent: hidden width must be >= k for masksembles");
  }
  if (method == Method::dropout || method == Method::dropconnect) {
    if (dropout_p < 0.0 || dropout_p >= 1.0)
      throw ConfigError("agent: dropout probability must lie in [0, 1)");
  }
}

Categorical SubmodelBundle::categorical(int submodel, int row) const {
  if (kind != SpaceKind::discrete)
    throw ConfigError("SubmodelBundle: categorical view of a continuous space");
  Categorical c;
  c.logits.resize(n);
  for (int j = 0; j < n; ++j) c.logits[j] = policy[submodel](row, j);
  return c;
}

DiagGaussian SubmodelBundle::gaussian(int submodel, int row) const {
  if (kind != SpaceKind::continuous)
    throw ConfigError("SubmodelBundle: gaussian view of a discrete space");
  DiagGaussian g;
  g.mean.resize(n);
  for (int j = 0; j < n; ++j) g.mean[j] = policy[submodel](row, j);
  g.log_std = log_std;
  return g;
}

std::vector<double> SubmodelBundle::state_values(int row) const {
  std::vector<double> out(k());
  for (int i = 0; i < k(); ++i) out[i] = values(i, row);
  return out;
}

int submodel_for_env(int env_index, int num_envs, int k) {
  if (k < 1) throw ConfigError("submodel_for_env: k must be positive");
  if (num_envs % k != 0)
    throw ConfigError("submodel_for_env: num_envs must be divisible by k");
  if (env_index < 0 || env_index >= num_envs)
    throw ConfigError("submodel_for_env: env index out of range");
  return env_index / (num_envs / k);
}

Agent::Agent(AgentConfig cfg) : cfg_(std::move(cfg)), obs_stats_(cfg_.obs_dim) {
  cfg_.validate();
  Rng init = Rng(cfg_.seed).derive(0x696e6974ULL);
  const int out_dim = cfg_.action_space.n;
  const int members = (cfg_.method == Method::ensembles) ? cfg_.k : 1;
  for (int i = 0; i < members; ++i) {
    Rng member_rng = init.derive(static_cast<std::uint64_t>(i));
    Rng policy_rng = member_rng.derive(1);
    Rng value_rng = member_rng.derive(2);
    policy_nets_.push_back(make_mlp(cfg_.obs_dim, cfg_.hidden, out_dim, 0.01, policy_rng));
    value_nets_.push_back(make_mlp(cfg_.obs_dim, cfg_.hidden, 1, 1.0, value_rng));
  }
  if (cfg_.action_space.kind == SpaceKind::continuous)
    log_std_ = Tensor::zeros(1, out_dim);
  if (cfg_.method == Method::masksembles) {
    for (int l = 0; l < 2; ++l) {
      policy_masks_.push_back(
          generate_masks(cfg_.k, cfg_.hidden[l], cfg_.scale, cfg_.seed + 11 * (l + 1)));
      value_masks_.push_back(
          generate_masks(cfg_.k, cfg_.hidden[l], cfg_.scale, cfg_.seed + 13 * (l + 1)));
    }
  }
}

std::vector<Agent::NamedParam> Agent::named_params() {
  std::vector<NamedParam> out;
  for (std::size_t i = 0; i < policy_nets_.size(); ++i) {
    for (int l = 0; l < policy_nets_[i].num_layers(); ++l) {
      out.push_back({"policy" + std::to_string(i) + ".w" + std::to_string(l),
                     &policy_nets_[i].weights[l]});
      out.push_back({"policy" + std::to_string(i) + ".b" + std::to_string(l),
                     &policy_nets_[i].biases[l]});
    }
  }
  if (cfg_.action_space.kind == SpaceKind::continuous)
    out.push_back({"log_std", &log_std_});
  for (std::size_t i = 0; i < value_nets_.size(); ++i) {
    for (int l = 0; l < value_nets_[i].num_layers(); ++l) {
      out.push_back({"value" + std::to_string(i) + ".w" + std::to_string(l),
                     &value_nets_[i].weights[l]});
      out.push_back({"value" + std::to_string(i) + ".b" + std::to_string(l),
                     &value_nets_[i].biases[l]});
    }
  }
  return out;
}

std::vector<Tensor*> Agent::param_ptrs() {
  std::vector<Tensor*> out;
  for (auto& np : named_params()) out.push_back(np.tensor);
  return out;
}

int Agent::net_for_submodel(int submodel) const {
  return (cfg_.method == Method::ensembles) ? submodel : 0;
}

namespace {

Tensor bernoulli_keep_row(int width, double p, Rng& rng) {
  // Inverted dropout: kept units scaled by 1/(1-p).
  Tensor row(1, width);
  const double keep = 1.0 - p;
  for (int j = 0; j < width; ++j) row(0, j) = (rng.uniform() >= p) ? 1.0 / keep : 0.0;
  return row;
}

Tensor bernoulli_keep_matrix(int rows, int cols, double p, Rng& rng) {
  Tensor m(rows, cols);
  const double keep = 1.0 - p;
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = (rng.uniform() >= p) ? 1.0 / keep : 0.0;
  return m;
}

Tensor mask_row(const MaskSet& set, int submodel) {
  // Kept channels rescaled by width/ones so activation magnitude matches the
  // unmasked net.
  Tensor row(1, set.width);
  const double gain = static_cast<double>(set.width) / set.ones_per_mask();
  for (int j = 0; j < set.width; ++j)
    row(0, j) = set.masks[submodel][j] ? gain : 0.0;
  return row;
}

}  // namespace

LayerNoise Agent::submodel_noise(bool value_net, int submodel, Rng& rng) const {
  LayerNoise noise;
  switch (cfg_.method) {
    case Method::none:
    case Method::ensembles:
      break;
    case Method::masksembles: {
      const auto& sets = value_net ? value_masks_ : policy_masks_;
      for (const MaskSet& set : sets) noise.unit_mult.push_back(mask_row(set, submodel));
      break;
    }
    case Method::dropout: {
      for (int l = 0; l < 2; ++l)
        noise.unit_mult.push_back(bernoulli_keep_row(cfg_.hidden[l], cfg_.dropout_p, rng));
      break;
    }
    case Method::dropconnect: {
      const Mlp& net = value_net ? value_nets_[0] : policy_nets_[0];
      for (int l = 0; l < 2; ++l)
        noise.weight_mult.push_back(bernoulli_keep_matrix(
            net.weights[l + 1].rows(), net.weights[l + 1].cols(), cfg_.dropout_p, rng));
      break;
    }
  }
  return noise;
}

std::vector<double> Agent::normalize(const std::vector<double>& raw_obs) const {
  if (!cfg_.obs_normalization) return raw_obs;
  return obs_stats_.normalize(raw_obs);
}

Tensor Agent::normalize_batch(const Tensor& raw_states) const {
  if (!cfg_.obs_normalization) return raw_states;
  Tensor out = raw_states;
  std::vector<double> row(raw_states.cols());
  for (int i = 0; i < raw_states.rows(); ++i) {
    for (int j = 0; j < raw_states.cols(); ++j) row[j] = raw_states(i, j);
    const std::vector<double> norm = obs_stats_.normalize(row);
    for (int j = 0; j < raw_states.cols(); ++j) out(i, j) = norm[j];
  }
  return out;
}

SubmodelBundle Agent::forward_all(const Tensor& raw_states, Rng& rng) const {
  if (cfg_.k < 2 && cfg_.method != Method::none)
    throw ConfigError("forward_all: k must be >= 2");
  const Tensor x = normalize_batch(raw_states);
  SubmodelBundle bundle;
  bundle.kind = cfg_.action_space.kind;
  bundle.n = cfg_.action_space.n;
  bundle.method = cfg_.method;
  bundle.values = Tensor(cfg_.k, x.rows());
  if (cfg_.action_space.kind == SpaceKind::continuous)
    bundle.log_std.assign(log_std_.data(), log_std_.data() + log_std_.cols());
  for (int i = 0; i < cfg_.k; ++i) {
    const int net = net_for_submodel(i);
    const LayerNoise pn = submodel_noise(false, i, rng);
    const LayerNoise vn = submodel_noise(true, i, rng);
    bundle.policy.push_back(mlp_forward(policy_nets_[net], x, pn));
    const Tensor v = mlp_forward(value_nets_[net], x, vn);
    for (int b = 0; b < x.rows(); ++b) bundle.values(i, b) = v(b, 0);
  }
  return bundle;
}

ActionDecision Agent::act_training(const std::vector<double>& raw_obs, int env_index,
                                   int num_envs, Rng& rng) const {
  const int submodel = submodel_for_env(env_index, num_envs, cfg_.k);
  const std::vector<double> obs = normalize(raw_obs);
  const Tensor x = Tensor::row(obs);
  const int net = net_for_submodel(submodel);
  const LayerNoise pn = submodel_noise(false, submodel, rng);
  const LayerNoise vn = submodel_noise(true, submodel, rng);
  const Tensor logits = mlp_forward(policy_nets_[net], x, pn);
  const Tensor value = mlp_forward(value_nets_[net], x, vn);

  ActionDecision d;
  d.submodel = submodel;
  d.value = value(0, 0);
  if (cfg_.action_space.kind == SpaceKind::discrete) {
    Categorical c;
    c.logits.assign(logits.data(), logits.data() + logits.cols());
    const int a = c.sample(rng);
    d.action = a;
    d.logprob = c.logprob(a);
  } else {
    DiagGaussian g;
    g.mean.assign(logits.data(), logits.data() + logits.cols());
    g.log_std.assign(log_std_.data(), log_std_.data() + log_std_.cols());
    const std::vector<double> a = g.sample(rng);
    d.logprob = g.logprob(a);
    d.action = a;
  }
  return d;
}

double Agent::submodel_value(const std::vector<double>& raw_obs, int submodel, Rng& rng) const {
  const Tensor x = Tensor::row(normalize(raw_obs));
  const LayerNoise vn = submodel_noise(true, submodel, rng);
  return mlp_forward(value_nets_[net_for_submodel(submodel)], x, vn)(0, 0);
}

int act_vote(const SubmodelBundle& b, int row, Rng& tie_rng) {
  if (b.kind != SpaceKind::discrete)
    throw ConfigError("act_vote: voting requires a discrete action space");
  std::vector<int> counts(b.n, 0);
  for (int i = 0; i < b.k(); ++i) ++counts[b.categorical(i, row).argmax()];
  int best = 0;
  for (int a = 1; a < b.n; ++a)
    if (counts[a] > counts[best]) best = a;
  std::vector<int> tied;
  for (int a = 0; a < b.n; ++a)
    if (counts[a] == counts[best]) tied.push_back(a);
  if (tied.size() == 1) return tied[0];
  return tied[tie_rng.uniform_int(static_cast<int>(tied.size()))];
}

DiagGaussian aggregate_gaussian(const SubmodelBundle& b, int row) {
  if (b.kind != SpaceKind::continuous)
    throw ConfigError("aggregate_gaussian: continuous action space required");
  DiagGaussian g;
  g.mean.assign(b.n, 0.0);
  g.log_std.assign(b.n, 0.0);
  std::vector<double> col(b.k());
  for (int j = 0; j < b.n; ++j) {
    for (int i = 0; i < b.k(); ++i) col[i] = b.policy[i](row, j);
    const double mu = pop_mean(col);
    const double spread = pop_std(col);
    const double sd = std::exp(b.log_std[j]);
    g.mean[j] = mu;
    g.log_std[j] = std::log(std::sqrt(sd * sd + spread * spread));
  }
  return g;
}

std::vector<double> act_gaussian_aggregate(const SubmodelBundle& b, int row,
                                           bool deterministic, Rng& rng) {
  const DiagGaussian g = aggregate_gaussian(b, row);
  if (deterministic) return g.mean;
  return g.sample(rng);
}

Action act_single(const SubmodelBundle& b, int row, int submodel, bool deterministic,
                  Rng& rng) {
  int i = submodel;
  if (i < 0) i = rng.uniform_int(b.k());
  if (i >= b.k()) throw ConfigError("act_single: submodel index out of range");
  if (b.kind == SpaceKind::discrete) {
    const Categorical c = b.categorical(i, row);
    return deterministic ? c.argmax() : c.sample(rng);
  }
  const DiagGaussian g = b.gaussian(i, row);
  return deterministic ? g.mean : g.sample(rng);
}

int act_avg_then_sample(const SubmodelBundle& b, int row, Rng& rng) {
  if (b.kind != SpaceKind::discrete)
    throw ConfigError("act_avg_then_sample: discrete action space required");
  std::vector<double> avg(b.n, 0.0);
  for (int i = 0; i < b.k(); ++i) {
    const std::vector<double> p = b.categorical(i, row).probs();
    for (int j = 0; j < b.n; ++j) avg[j] += p[j] / b.k();
  }
  const double u = rng.uniform();
  double acc = 0.0;
  for (int j = 0; j < b.n; ++j) {
    acc += avg[j];
    if (u < acc) return j;
  }
  return b.n - 1;
}

std::string scheme_name(EvalScheme s) {
  switch (s) {
    case EvalScheme::scheme_default: return "default";
    case EvalScheme::vote: return "vote";
    case EvalScheme::avg_then_sample: return "avg_then_sample";
    case EvalScheme::aggregate: return "aggregate";
    case EvalScheme::single: return "single";
  }
  return "default";
}

EvalScheme scheme_from_name(const std::string& name) {
  if (name == "default") return EvalScheme::scheme_default;
  if (name == "vote") return EvalScheme::vote;
  if (name == "avg_then_sample") return EvalScheme::avg_then_sample;
  if (name == "aggregate") return EvalScheme::aggregate;
  if (name == "single") return EvalScheme::single;
  throw ConfigError("unknown inference scheme: " + name);
}

Action act_eval(const SubmodelBundle& b, int row, EvalScheme scheme, bool deterministic,
                Rng& rng, Rng& tie_rng) {
  if (b.k() == 1) {
    // Baseline: every scheme reduces to the single policy.
    return act_single(b, row, 0, deterministic, rng);
  }
  switch (scheme) {
    case EvalScheme::scheme_default:
      if (b.kind == SpaceKind::discrete) return act_vote(b, row, tie_rng);
      return act_gaussian_aggregate(b, row, deterministic, rng);
    case EvalScheme::vote:
      return act_vote(b, row, tie_rng);
    case EvalScheme::avg_then_sample:
      return act_avg_then_sample(b, row, rng);
    case EvalScheme::aggregate:
      if (b.kind == SpaceKind::discrete) return act_avg_then_sample(b, row, rng);
      return act_gaussian_aggregate(b, row, deterministic, rng);
    case EvalScheme::single:
      return act_single(b, row, -1, deterministic, rng);
  }
  throw ConfigError("act_eval: unhandled scheme");
}

}  // namespace oodppo
