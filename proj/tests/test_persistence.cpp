// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oodppo/checkpoint.hpp"
#include "oodppo/commands.hpp"
#include "oodppo/config.hpp"
#include "oodppo/csv.hpp"
#include "oodppo/errors.hpp"
#include "oodppo/evaluate.hpp"
#include "oodppo/ppo.hpp"

using namespace oodppo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("oodppo_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

RunConfig tiny_train_config() {
  RunConfig cfg;
  cfg.env = "bandit2";
  cfg.method = Method::masksembles;
  cfg.seed = 3;
  cfg.k = 2;
  cfg.hidden = {8, 8, 8};
  cfg.ppo.num_envs = 4;
  cfg.ppo.steps_per_env = 16;
  cfg.ppo.minibatch_size = 32;
  cfg.ppo.epochs = 2;
  cfg.ppo.total_timesteps = 256;
  return cfg;
}

}  // namespace

TEST_CASE("config json round trip and validation") {
  RunConfig cfg = tiny_train_config();
  const nlohmann::json j = cfg.to_json();
  const RunConfig back = RunConfig::from_json(j);
  CHECK(back.to_json() == j);

  SUBCASE("unknown top-level key") {
    nlohmann::json bad = j;
    bad["surprise"] = 1;
    CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigError);
  }
  SUBCASE("unknown nested key") {
    nlohmann::json bad = j;
    bad["ppo"]["warmup"] = 10;
    CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigError);
  }
  SUBCASE("bad env id") {
    nlohmann::json bad = j;
    bad["env"] = "mountaincar";
    CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigError);
  }
  SUBCASE("wrong type") {
    nlohmann::json bad = j;
    bad["ppo"]["gamma"] = "high";
    CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigError);
  }
  SUBCASE("violated precondition") {
    nlohmann::json bad = j;
    bad["agent"]["k"] = 3;  // 4 envs not divisible by 3
    CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigError);
  }
}

TEST_CASE("checkpoint round trip is byte-identical") {
  TempDir dir("ckpt");
  RunConfig cfg = tiny_train_config();
  Agent agent(cfg.agent_config(1, {SpaceKind::discrete, 2}));
  AdamState opt = AdamState::like(agent.param_ptrs());
  train(cfg.env, EnvParams{}, agent, cfg.ppo, TrainMode::shared_buffer, opt, cfg.seed);

  Rng rng(cfg.seed);
  const Checkpoint ck = Checkpoint::capture(cfg, agent, opt, rng);
  ck.save(dir.file("a.bin"));
  const Checkpoint loaded = Checkpoint::load(dir.file("a.bin"));
  loaded.save(dir.file("b.bin"));
  CHECK(slurp(dir.file("a.bin")) == slurp(dir.file("b.bin")));
}

TEST_CASE("checkpoint restore preserves behavior exactly") {
  TempDir dir("restore");
  RunConfig cfg = tiny_train_config();
  Agent agent(cfg.agent_config(1, {SpaceKind::discrete, 2}));
  AdamState opt = AdamState::like(agent.param_ptrs());
  train(cfg.env, EnvParams{}, agent, cfg.ppo, TrainMode::shared_buffer, opt, cfg.seed);
  Rng rng(cfg.seed);
  Checkpoint::capture(cfg, agent, opt, rng).save(dir.file("ck.bin"));

  const Agent restored = Checkpoint::load(dir.file("ck.bin")).restore_agent();
  EvalOptions eopt;
  const EpisodeStats a = evaluate_policy(agent, cfg.env, EnvParams{}, 10, eopt, 99);
  const EpisodeStats b = evaluate_policy(restored, cfg.env, EnvParams{}, 10, eopt, 99);
  CHECK(a.episode_returns == b.episode_returns);
}

TEST_CASE("checkpoint version mismatch is an explicit error") {
  TempDir dir("ver");
  RunConfig cfg = tiny_train_config();
  Agent agent(cfg.agent_config(1, {SpaceKind::discrete, 2}));
  AdamState opt = AdamState::like(agent.param_ptrs());
  Rng rng(1);
  Checkpoint ck = Checkpoint::capture(cfg, agent, opt, rng);
  ck.save(dir.file("ck.bin"));

  // Corrupt the stored version field.
  std::string bytes = slurp(dir.file("ck.bin"));
  const std::size_t pos = bytes.find("\"version\":1");
  REQUIRE(pos != std::string::npos);
  bytes.replace(pos, 11, "\"version\":9");
  std::ofstream out(dir.file("bad.bin"), std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  CHECK_THROWS_AS(Checkpoint::load(dir.file("bad.bin")), IoError);
}

TEST_CASE("cmd_train writes outputs and refuses to overwrite") {
  TempDir dir("cmd");
  const RunConfig cfg = tiny_train_config();
  const std::string cfg_path = dir.file("run.json");
  {
    std::ofstream out(cfg_path);
    out << cfg.to_json().dump(2);
  }
  CommandOptions opt;
  opt.config_path = cfg_path;
  opt.out_dir = dir.file("out");
  CHECK(cmd_train(opt) == 0);
  CHECK(fs::exists(dir.file("out/checkpoint.bin")));
  CHECK(fs::exists(dir.file("out/train_curve.csv")));
  CHECK(fs::exists(dir.file("out/config.resolved.json")));

  // Second run without --force refuses; with --force it succeeds.
  CHECK_THROWS_AS(cmd_train(opt), IoError);
  opt.force = true;
  CHECK(cmd_train(opt) == 0);
}

TEST_CASE("cmd_train rerun is bitwise deterministic") {
  TempDir dir("det");
  const RunConfig cfg = tiny_train_config();
  const std::string cfg_path = dir.file("run.json");
  {
    std::ofstream out(cfg_path);
    out << cfg.to_json().dump(2);
  }
  CommandOptions a;
  a.config_path = cfg_path;
  a.out_dir = dir.file("a");
  CommandOptions b = a;
  b.out_dir = dir.file("b");
  REQUIRE(cmd_train(a) == 0);
  REQUIRE(cmd_train(b) == 0);
  CHECK(slurp(dir.file("a/checkpoint.bin")) == slurp(dir.file("b/checkpoint.bin")));
  CHECK(slurp(dir.file("a/train_curve.csv")) == slurp(dir.file("b/train_curve.csv")));
}

TEST_CASE("resolved config reproduces the run exactly") {
  TempDir dir("resolved");
  const RunConfig cfg = tiny_train_config();
  {
    std::ofstream out(dir.file("run.json"));
    out << cfg.to_json().dump(2);
  }
  CommandOptions first;
  first.config_path = dir.file("run.json");
  first.out_dir = dir.file("out1");
  REQUIRE(cmd_train(first) == 0);

  CommandOptions second;
  second.config_path = dir.file("out1/config.resolved.json");
  second.out_dir = dir.file("out2");
  REQUIRE(cmd_train(second) == 0);
  CHECK(slurp(dir.file("out1/checkpoint.bin")) == slurp(dir.file("out2/checkpoint.bin")));
}

TEST_CASE("eval and oodbench commands run end to end") {
  TempDir dir("endtoend");
  RunConfig cfg = tiny_train_config();
  cfg.env = "gridchase";
  cfg.ppo.total_timesteps = 512;
  cfg.bench.n_id_steps = 120;
  cfg.bench.n_ood_configs = 3;
  cfg.bench.steps_per_config = 40;
  cfg.bench.burn_in = 5;
  cfg.eval.episodes = 3;
  cfg.eval.seeds = 2;
  {
    std::ofstream out(dir.file("run.json"));
    out << cfg.to_json().dump(2);
  }
  CommandOptions t;
  t.config_path = dir.file("run.json");
  t.out_dir = dir.file("train");
  REQUIRE(cmd_train(t) == 0);

  cfg.checkpoint = dir.file("train/checkpoint.bin");
  {
    std::ofstream out(dir.file("eval.json"));
    out << cfg.to_json().dump(2);
  }
  CommandOptions e;
  e.config_path = dir.file("eval.json");
  e.out_dir = dir.file("eval");
  REQUIRE(cmd_eval(e) == 0);
  const auto eval_rows = parse_csv(slurp(dir.file("eval/eval.csv")));
  REQUIRE(eval_rows.size() >= 3);  // header + aggregate + single
  CHECK(eval_rows[0][0] == "method");

  // Re-running the deterministic evaluation reproduces identical rows.
  CommandOptions e2 = e;
  e2.out_dir = dir.file("eval2");
  REQUIRE(cmd_eval(e2) == 0);
  CHECK(slurp(dir.file("eval/eval.csv")) == slurp(dir.file("eval2/eval.csv")));

  CommandOptions o;
  o.config_path = dir.file("eval.json");
  o.out_dir = dir.file("bench");
  REQUIRE(cmd_oodbench(o) == 0);
  const auto summary = parse_csv(slurp(dir.file("bench/summary.csv")));
  REQUIRE(summary.size() == 6);  // header + 5 discrete measures
  CHECK(fs::exists(dir.file("bench/roc_value_std.csv")));
  CHECK(fs::exists(dir.file("bench/timeline.csv")));
  const auto timeline = parse_csv(slurp(dir.file("bench/timeline.csv")));
  CHECK(timeline.size() > 1);

  // Missing checkpoint is a config error (exit 2 at the CLI).
  RunConfig no_ck = cfg;
  no_ck.checkpoint = "";
  {
    std::ofstream out(dir.file("no_ck.json"));
    out << no_ck.to_json().dump(2);
  }
  CommandOptions bad;
  bad.config_path = dir.file("no_ck.json");
  bad.out_dir = dir.file("bad");
  CHECK_THROWS_AS(cmd_eval(bad), ConfigError);
}

TEST_CASE("cmd_sweep writes sweep and pareto tables") {
  TempDir dir("sweepcmd");
  RunConfig cfg = tiny_train_config();
  cfg.sweep.n_configs = 2;
  cfg.sweep.budget_per_config = 256;
  cfg.sweep.proxy_id_states = 32;
  cfg.sweep.eval_episodes = 2;
  cfg.sweep.space.hidden_width = {8};
  cfg.sweep.space.k_choices = {2};
  cfg.sweep.space.epochs = {2};
  {
    std::ofstream out(dir.file("run.json"));
    out << cfg.to_json().dump(2);
  }
  CommandOptions s;
  s.config_path = dir.file("run.json");
  s.out_dir = dir.file("out");
  REQUIRE(cmd_sweep(s) == 0);
  const auto rows = parse_csv(slurp(dir.file("out/sweep.csv")));
  REQUIRE(rows.size() == 3);  // header + 2 configs
  const auto front = parse_csv(slurp(dir.file("out/pareto.csv")));
  CHECK(front.size() >= 2);
  CHECK(front[0] == rows[0]);  // identical schema
  // Every pareto row is literally one of the sweep rows.
  for (std::size_t i = 1; i < front.size(); ++i) {
    bool found = false;
    for (std::size_t r = 1; r < rows.size(); ++r) found = found || rows[r] == front[i];
    CHECK(found);
  }
}

TEST_CASE("csv writer round trip and quoting") {
  CsvWriter w({"a", "b"});
  w.write({"1,5", "plain"});
  w.write({"with \"quote\"", "x"});
  const auto rows = parse_csv(w.str());
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "1,5");
  CHECK(rows[2][0] == "with \"quote\"");
  CHECK_THROWS_AS(w.write({"only-one"}), IoError);
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(std::nan("")) == "nan");
}
