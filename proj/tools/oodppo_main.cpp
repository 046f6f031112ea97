// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "oodppo/commands.hpp"

namespace {

int env_threads() {
  const char* v = std::getenv("OODPPO_THREADS");
  if (!v) return 1;
  const int n = std::atoi(v);
  return n > 0 ? n : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"On-policy actor-critic toolkit with multi-sample uncertainty layers"};
  app.require_subcommand(1);

  oodppo::CommandOptions opt;
  opt.threads = env_threads();
  std::uint64_t seed = 0;
  bool has_seed = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "run configuration (JSON)")->required();
    cmd->add_option("--out", opt.out_dir, "output directory")->required();
    cmd->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
      has_seed = true;
    });
    cmd->add_flag("--force", opt.force, "overwrite existing outputs");
  };

  CLI::App* train = app.add_subcommand("train", "train an agent; writes checkpoint + curve");
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint over episodes");
  CLI::App* oodbench = app.add_subcommand("oodbench", "run the OOD detection benchmark");
  CLI::App* sweep = app.add_subcommand("sweep", "two-objective hyperparameter sweep");
  for (CLI::App* cmd : {train, eval, oodbench, sweep}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);
  if (has_seed) opt.seed_override = seed;

  try {
    if (train->parsed()) return oodppo::cmd_train(opt);
    if (eval->parsed()) return oodppo::cmd_eval(opt);
    if (oodbench->parsed()) return oodppo::cmd_oodbench(opt);
    if (sweep->parsed()) return oodppo::cmd_sweep(opt);
  } catch (...) {
    return oodppo::exit_code_for_current_exception();
  }
  return 0;
}
