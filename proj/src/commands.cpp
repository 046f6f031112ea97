// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "oodppo/checkpoint.hpp"
#include "oodppo/config.hpp"
#include "oodppo/csv.hpp"
#include "oodppo/errors.hpp"
#include "oodppo/evaluate.hpp"
#include "oodppo/ood.hpp"
#include "oodppo/sweep.hpp"

namespace oodppo {

namespace fs = std::filesystem;

namespace {

RunConfig load_config(const CommandOptions& opt) {
  RunConfig cfg = RunConfig::load(opt.config_path);
  if (opt.seed_override) cfg.seed = *opt.seed_override;
  return cfg;
}

// Refuse to overwrite existing outputs unless --force was given.
void prepare_outputs(const CommandOptions& opt, const std::vector<std::string>& files) {
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + opt.out_dir);
  if (!opt.force) {
    for (const std::string& f : files) {
      const fs::path p = fs::path(opt.out_dir) / f;
      if (fs::exists(p))
        throw IoError("output exists (use --force to overwrite): " + p.string());
    }
  }
}

std::string out_path(const CommandOptions& opt, const std::string& file) {
  return (fs::path(opt.out_dir) / file).string();
}

void write_resolved_config(const CommandOptions& opt, const RunConfig& cfg) {
  std::ofstream out(out_path(opt, "config.resolved.json"));
  if (!out) throw IoError("cannot write config.resolved.json");
  out << cfg.to_json().dump(2) << "\n";
}

Checkpoint load_checkpoint_for(const RunConfig& cfg) {
  if (cfg.checkpoint.empty())
    throw ConfigError("config: 'checkpoint' path required for this command");
  return Checkpoint::load(cfg.checkpoint);
}

std::vector<std::string> curve_header() {
  return {"iteration", "timesteps", "mean_episode_reward", "mean_episode_len",
          "loss",      "policy_loss", "value_loss",        "entropy"};
}

std::vector<std::string> curve_fields(const CurveRow& r) {
  return {std::to_string(r.iteration),       std::to_string(r.timesteps),
          format_double(r.mean_episode_reward), format_double(r.mean_episode_len),
          format_double(r.loss),             format_double(r.policy_loss),
          format_double(r.value_loss),       format_double(r.entropy)};
}

}  // namespace

int cmd_train(const CommandOptions& opt) {
  const RunConfig cfg = load_config(opt);
  prepare_outputs(opt, {"checkpoint.bin", "train_curve.csv", "config.resolved.json"});
  write_resolved_config(opt, cfg);

  std::unique_ptr<Env> probe = make_env(cfg.env, EnvParams{});
  Agent agent(cfg.agent_config(probe->obs_dim(), probe->action_space()));
  AdamState adam = AdamState::like(agent.param_ptrs());
  Rng run_rng(cfg.seed);

  CsvWriter curve(curve_header());
  bool diverged = false;
  std::string diagnostic;
  try {
    train(cfg.env, EnvParams{}, agent, cfg.ppo, cfg.mode, adam, cfg.seed,
          [&](const CurveRow& r) { curve.write(curve_fields(r)); });
  } catch (const DivergenceError& e) {
    diverged = true;
    diagnostic = e.what();
  }
  curve.save(out_path(opt, "train_curve.csv"));
  if (diverged) {
    std::cerr << "training diverged: " << diagnostic << "\n";
    return 3;
  }
  Checkpoint::capture(cfg, agent, adam, run_rng).save(out_path(opt, "checkpoint.bin"));
  return 0;
}

int cmd_eval(const CommandOptions& opt) {
  const RunConfig cfg = load_config(opt);
  prepare_outputs(opt, {"eval.csv", "config.resolved.json"});
  write_resolved_config(opt, cfg);

  const Checkpoint ck = load_checkpoint_for(cfg);
  const Agent agent = ck.restore_agent();

  CsvWriter table({"method", "env", "scheme", "seeds", "episodes_per_seed", "mean_reward",
                   "std_reward", "mean_episode_len"});
  std::vector<EvalScheme> schemes;
  if (cfg.eval.scheme == "default") {
    schemes = {EvalScheme::scheme_default, EvalScheme::single};
  } else {
    schemes = {scheme_from_name(cfg.eval.scheme)};
  }
  for (EvalScheme scheme : schemes) {
    EvalOptions eopt;
    eopt.scheme = scheme;
    eopt.deterministic = cfg.eval.deterministic;
    std::vector<double> all_returns;
    std::vector<int> all_lengths;
    for (int s = 0; s < cfg.eval.seeds; ++s) {
      const std::uint64_t eval_seed = Rng(cfg.seed).derive(0x6576616cULL, s).base_seed();
      EpisodeStats stats =
          evaluate_policy(agent, cfg.env, EnvParams{}, cfg.eval.episodes, eopt, eval_seed);
      all_returns.insert(all_returns.end(), stats.episode_returns.begin(),
                         stats.episode_returns.end());
      all_lengths.insert(all_lengths.end(), stats.episode_lengths.begin(),
                         stats.episode_lengths.end());
    }
    double len_sum = 0;
    for (int l : all_lengths) len_sum += l;
    table.write({method_name(agent.config().method), cfg.env, scheme_name(scheme),
                 std::to_string(cfg.eval.seeds), std::to_string(cfg.eval.episodes),
                 format_double(pop_mean(all_returns)), format_double(pop_std(all_returns)),
                 format_double(len_sum / all_lengths.size())});
  }
  table.save(out_path(opt, "eval.csv"));
  return 0;
}

int cmd_oodbench(const CommandOptions& opt) {
  const RunConfig cfg = load_config(opt);
  const Checkpoint ck = load_checkpoint_for(cfg);
  const Agent agent = ck.restore_agent();
  if (agent.num_submodels() < 2)
    throw ConfigError(
        "oodbench: the checkpointed agent has a single submodel (method none); "
        "uncertainty scoring needs a multi-sample method with k >= 2");

  std::vector<std::string> outputs = {"summary.csv", "timeline.csv", "config.resolved.json"};
  for (const std::string& m : applicable_measures(agent)) outputs.push_back("roc_" + m + ".csv");
  prepare_outputs(opt, outputs);
  write_resolved_config(opt, cfg);

  EvalOptions eopt;
  eopt.scheme = scheme_from_name(cfg.eval.scheme);
  eopt.deterministic = cfg.eval.deterministic;
  UncertaintyOptions uopt;
  uopt.cat_std_on_probs = cfg.bench.cat_std_on_probs;

  Rng root(cfg.seed);
  const std::vector<std::vector<double>> id_states = collect_id_states(
      agent, cfg.env, EnvParams{}, cfg.bench.n_id_steps, eopt, root.derive(0x6964ULL).base_seed());

  std::vector<std::vector<double>> ood_states;
  std::vector<std::string> ood_prov;
  const AttackSpec attack =
      AttackSpec::parse(cfg.bench.attack_kind, cfg.bench.attack_level, cfg.bench.attack_dims);
  if (attack.kind != AttackSpec::Kind::none) {
    Rng attack_rng = root.derive(0x617474ULL);
    ood_states = apply_attack(id_states, attack, agent.obs_stats(), attack_rng);
    ood_prov.assign(ood_states.size(), "attack:" + attack.name());
  } else {
    OodStates ood = collect_ood_states(
        agent, cfg.env, EnvParams{}, PerturbationAxes::from_names(cfg.bench.perturb_axes),
        cfg.bench.n_ood_configs, cfg.bench.steps_per_config, cfg.bench.burn_in, eopt,
        root.derive(0x6f6f6432ULL).base_seed());
    ood_states = std::move(ood.states);
    ood_prov = std::move(ood.provenance);
  }

  LabeledStateSet labeled;
  for (const auto& s : id_states) labeled.add(s, false, "id");
  for (std::size_t i = 0; i < ood_states.size(); ++i)
    labeled.add(ood_states[i], true, ood_prov[i]);

  const std::vector<RocResult> rocs =
      score_measures(agent, labeled, uopt, root.derive(0x73636f72ULL).base_seed());

  CsvWriter summary({"measure", "auc", "n_id", "n_ood", "flipped_flag"});
  for (const RocResult& r : rocs) {
    summary.write({r.measure, format_double(r.auc), std::to_string(r.n_id),
                   std::to_string(r.n_ood), r.flipped ? "1" : "0"});
    CsvWriter curve({"threshold", "fpr", "tpr"});
    curve.write({"inf", "0", "0"});
    for (std::size_t i = 0; i < r.thresholds.size(); ++i)
      curve.write({format_double(r.thresholds[i]), format_double(r.points[i + 1].first),
                   format_double(r.points[i + 1].second)});
    curve.save(out_path(opt, "roc_" + r.measure + ".csv"));
  }
  summary.save(out_path(opt, "summary.csv"));

  const Timeline tl = uncertainty_timeline(agent, id_states, ood_states, uopt,
                                           root.derive(0x746c6eULL).base_seed());
  std::vector<std::string> header = {"step", "is_ood", "value_std", "policy_std", "policy_js"};
  if (tl.discrete) {
    header.push_back("max_prob");
    header.push_back("entropy");
  }
  CsvWriter timeline(header);
  for (const TimelinePoint& p : tl.points) {
    std::vector<std::string> row = {std::to_string(p.step), p.ood ? "1" : "0",
                                    format_double(p.report.value_u),
                                    format_double(p.report.policy_u_std),
                                    format_double(p.report.policy_u_js)};
    if (tl.discrete) {
      row.push_back(format_double(p.report.max_prob_u.value()));
      row.push_back(format_double(p.report.entropy_u.value()));
    }
    timeline.write(row);
  }
  timeline.save(out_path(opt, "timeline.csv"));
  return 0;
}

int cmd_sweep(const CommandOptions& opt) {
  const RunConfig cfg = load_config(opt);
  prepare_outputs(opt, {"sweep.csv", "pareto.csv", "config.resolved.json"});
  write_resolved_config(opt, cfg);

  SweepOptions sopt;
  sopt.method = cfg.method;
  sopt.env_id = cfg.env;
  sopt.n_configs = cfg.sweep.n_configs;
  sopt.budget_per_config = cfg.sweep.budget_per_config;
  sopt.objective = cfg.sweep.objective;
  sopt.eval_episodes = cfg.sweep.eval_episodes;
  sopt.proxy_id_states = cfg.sweep.proxy_id_states;
  sopt.space = cfg.sweep.space;
  sopt.base = cfg.ppo;
  sopt.threads = opt.threads;

  const SweepResult result = run_sweep(sopt, cfg.seed);

  const std::vector<std::string> header = {
      "config_id", "method",    "learning_rate", "hidden_width", "k",
      "scale",     "dropout_p", "clip_range",    "ent_coef",     "gae_lambda",
      "epochs",    "reward",    "auc",           "dominated"};
  auto row_fields = [&](const SweepRow& r) {
    return std::vector<std::string>{
        std::to_string(r.config_id), method_name(sopt.method),
        format_double(r.sample.learning_rate), std::to_string(r.sample.hidden_width),
        std::to_string(r.sample.k), format_double(r.sample.scale),
        format_double(r.sample.dropout_p), format_double(r.sample.clip_range),
        format_double(r.sample.ent_coef), format_double(r.sample.gae_lambda),
        std::to_string(r.sample.epochs), format_double(r.reward), format_double(r.auc),
        r.dominated ? "1" : "0"};
  };
  CsvWriter table(header);
  for (const SweepRow& r : result.rows) table.write(row_fields(r));
  table.save(out_path(opt, "sweep.csv"));

  // pareto.csv carries the same schema: a row subset of sweep.csv.
  CsvWriter front(header);
  for (const ParetoPoint& p : result.front) front.write(row_fields(result.rows[p.config_id]));
  front.save(out_path(opt, "pareto.csv"));
  return 0;
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "numeric divergence: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace oodppo
