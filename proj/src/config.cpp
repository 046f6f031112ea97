// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/config.hpp"

#include <fstream>
#include <set>

#include "oodppo/errors.hpp"

namespace oodppo {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& known) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: field '") + key + "' has the wrong type");
  }
}

std::pair<double, double> read_range(const json& j, const char* key,
                                     std::pair<double, double> def) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2)
    throw ConfigError(std::string("config: '") + key + "' must be a [lo, hi] pair");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  check_keys(j, "config",
             {"env", "method", "seed", "checkpoint", "agent", "ppo", "mode", "eval", "bench",
              "sweep"});
  read(j, "env", c.env);
  std::string method = method_name(c.method);
  read(j, "method", method);
  c.method = method_from_name(method);
  read(j, "seed", c.seed);
  read(j, "checkpoint", c.checkpoint);

  if (j.contains("agent")) {
    const json& a = j.at("agent");
    check_keys(a, "agent", {"hidden", "k", "scale", "dropout_p", "freeze_log_std"});
    read(a, "hidden", c.hidden);
    read(a, "k", c.k);
    read(a, "scale", c.scale);
    read(a, "dropout_p", c.dropout_p);
    read(a, "freeze_log_std", c.freeze_log_std);
  }

  if (j.contains("ppo")) {
    const json& p = j.at("ppo");
    check_keys(p, "ppo",
               {"gamma", "gae_lambda", "clip_range", "ent_coef", "vf_coef", "learning_rate",
                "epochs", "minibatch_size", "steps_per_env", "num_envs", "max_grad_norm",
                "total_timesteps", "obs_normalization", "normalize_advantage",
                "linear_lr_decay"});
    read(p, "gamma", c.ppo.gamma);
    read(p, "gae_lambda", c.ppo.gae_lambda);
    read(p, "clip_range", c.ppo.clip_range);
    read(p, "ent_coef", c.ppo.ent_coef);
    read(p, "vf_coef", c.ppo.vf_coef);
    read(p, "learning_rate", c.ppo.learning_rate);
    read(p, "epochs", c.ppo.epochs);
    read(p, "minibatch_size", c.ppo.minibatch_size);
    read(p, "steps_per_env", c.ppo.steps_per_env);
    read(p, "num_envs", c.ppo.num_envs);
    read(p, "max_grad_norm", c.ppo.max_grad_norm);
    read(p, "total_timesteps", c.ppo.total_timesteps);
    read(p, "obs_normalization", c.ppo.obs_normalization);
    read(p, "normalize_advantage", c.ppo.normalize_advantage);
    read(p, "linear_lr_decay", c.ppo.linear_lr_decay);
  }

  std::string mode = train_mode_name(c.mode);
  read(j, "mode", mode);
  c.mode = train_mode_from_name(mode);

  if (j.contains("eval")) {
    const json& e = j.at("eval");
    check_keys(e, "eval", {"episodes", "seeds", "scheme", "deterministic"});
    read(e, "episodes", c.eval.episodes);
    read(e, "seeds", c.eval.seeds);
    read(e, "scheme", c.eval.scheme);
    read(e, "deterministic", c.eval.deterministic);
  }

  if (j.contains("bench")) {
    const json& b = j.at("bench");
    check_keys(b, "bench",
               {"n_id_steps", "n_ood_configs", "steps_per_config", "burn_in", "attack",
                "perturb_axes", "cat_std_on_probs"});
    read(b, "n_id_steps", c.bench.n_id_steps);
    read(b, "n_ood_configs", c.bench.n_ood_configs);
    read(b, "steps_per_config", c.bench.steps_per_config);
    read(b, "burn_in", c.bench.burn_in);
    read(b, "perturb_axes", c.bench.perturb_axes);
    read(b, "cat_std_on_probs", c.bench.cat_std_on_probs);
    if (b.contains("attack")) {
      const json& at = b.at("attack");
      check_keys(at, "attack", {"kind", "level", "dims"});
      read(at, "kind", c.bench.attack_kind);
      read(at, "level", c.bench.attack_level);
      read(at, "dims", c.bench.attack_dims);
    }
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_keys(s, "sweep",
               {"n_configs", "budget_per_config", "objective", "eval_episodes",
                "proxy_id_states", "space"});
    read(s, "n_configs", c.sweep.n_configs);
    read(s, "budget_per_config", c.sweep.budget_per_config);
    read(s, "objective", c.sweep.objective);
    read(s, "eval_episodes", c.sweep.eval_episodes);
    read(s, "proxy_id_states", c.sweep.proxy_id_states);
    if (s.contains("space")) {
      const json& sp = s.at("space");
      check_keys(sp, "sweep.space",
                 {"learning_rate", "hidden_width", "k", "scale", "dropout_p", "clip_range",
                  "ent_coef", "gae_lambda", "epochs"});
      SweepSpace& sw = c.sweep.space;
      sw.learning_rate = read_range(sp, "learning_rate", sw.learning_rate);
      read(sp, "hidden_width", sw.hidden_width);
      read(sp, "k", sw.k_choices);
      sw.scale = read_range(sp, "scale", sw.scale);
      sw.dropout_p = read_range(sp, "dropout_p", sw.dropout_p);
      sw.clip_range = read_range(sp, "clip_range", sw.clip_range);
      sw.ent_coef = read_range(sp, "ent_coef", sw.ent_coef);
      sw.gae_lambda = read_range(sp, "gae_lambda", sw.gae_lambda);
      read(sp, "epochs", sw.epochs);
    }
  }

  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["env"] = env;
  j["method"] = method_name(method);
  j["seed"] = seed;
  j["checkpoint"] = checkpoint;
  j["mode"] = train_mode_name(mode);
  j["agent"] = {{"hidden", hidden},
                {"k", k},
                {"scale", scale},
                {"dropout_p", dropout_p},
                {"freeze_log_std", freeze_log_std}};
  j["ppo"] = {{"gamma", ppo.gamma},
              {"gae_lambda", ppo.gae_lambda},
              {"clip_range", ppo.clip_range},
              {"ent_coef", ppo.ent_coef},
              {"vf_coef", ppo.vf_coef},
              {"learning_rate", ppo.learning_rate},
              {"epochs", ppo.epochs},
              {"minibatch_size", ppo.minibatch_size},
              {"steps_per_env", ppo.steps_per_env},
              {"num_envs", ppo.num_envs},
              {"max_grad_norm", ppo.max_grad_norm},
              {"total_timesteps", ppo.total_timesteps},
              {"obs_normalization", ppo.obs_normalization},
              {"normalize_advantage", ppo.normalize_advantage},
              {"linear_lr_decay", ppo.linear_lr_decay}};
  j["eval"] = {{"episodes", eval.episodes},
               {"seeds", eval.seeds},
               {"scheme", eval.scheme},
               {"deterministic", eval.deterministic}};
  j["bench"] = {{"n_id_steps", bench.n_id_steps},
                {"n_ood_configs", bench.n_ood_configs},
                {"steps_per_config", bench.steps_per_config},
                {"burn_in", bench.burn_in},
                {"attack",
                 {{"kind", bench.attack_kind},
                  {"level", bench.attack_level},
                  {"dims", bench.attack_dims}}},
                {"perturb_axes", bench.perturb_axes},
                {"cat_std_on_probs", bench.cat_std_on_probs}};
  j["sweep"] = {{"n_configs", sweep.n_configs},
                {"budget_per_config", sweep.budget_per_config},
                {"objective", sweep.objective},
                {"eval_episodes", sweep.eval_episodes},
                {"proxy_id_states", sweep.proxy_id_states},
                {"space",
                 {{"learning_rate", {sweep.space.learning_rate.first, sweep.space.learning_rate.second}},
                  {"hidden_width", sweep.space.hidden_width},
                  {"k", sweep.space.k_choices},
                  {"scale", {sweep.space.scale.first, sweep.space.scale.second}},
                  {"dropout_p", {sweep.space.dropout_p.first, sweep.space.dropout_p.second}},
                  {"clip_range", {sweep.space.clip_range.first, sweep.space.clip_range.second}},
                  {"ent_coef", {sweep.space.ent_coef.first, sweep.space.ent_coef.second}},
                  {"gae_lambda", {sweep.space.gae_lambda.first, sweep.space.gae_lambda.second}},
                  {"epochs", sweep.space.epochs}}}};
  return j;
}

AgentConfig RunConfig::agent_config(int obs_dim, const ActionSpace& space) const {
  AgentConfig a;
  a.obs_dim = obs_dim;
  a.action_space = space;
  a.hidden = hidden;
  a.method = method;
  a.k = (method == Method::none) ? 1 : k;
  a.scale = scale;
  a.dropout_p = dropout_p;
  a.freeze_log_std = freeze_log_std;
  a.obs_normalization = ppo.obs_normalization;
  a.seed = seed;
  return a;
}

void RunConfig::validate() const {
  bool known_env = false;
  for (const std::string& id : env_ids()) known_env = known_env || id == env;
  if (!known_env) throw ConfigError("config: unknown env '" + env + "'");
  ppo.validate();
  if (method != Method::none) {
    if (k < 2) throw ConfigError("config: k must be >= 2 for method " + method_name(method));
    if (ppo.num_envs % k != 0)
      throw ConfigError("config: num_envs must be divisible by k");
  }
  if (eval.episodes < 1 || eval.seeds < 1)
    throw ConfigError("config: eval episodes and seeds must be positive");
  scheme_from_name(eval.scheme);
  AttackSpec::parse(bench.attack_kind, bench.attack_level, bench.attack_dims);
  PerturbationAxes::from_names(bench.perturb_axes);
  if (bench.n_id_steps < 0 || bench.n_ood_configs < 1 || bench.steps_per_config < 1 ||
      bench.burn_in < 0)
    throw ConfigError("config: invalid benchmark parameters");
  if (sweep.objective != "value_std" && sweep.objective != "policy_std")
    throw ConfigError("config: sweep objective must be value_std or policy_std");
  if (sweep.n_configs < 1 || sweep.budget_per_config < 0 || sweep.proxy_id_states < 1)
    throw ConfigError("config: invalid sweep parameters");
  if (mode == TrainMode::independent && method != Method::ensembles)
    throw ConfigError("config: independent training mode applies to ensembles only");
}

}  // namespace oodppo
