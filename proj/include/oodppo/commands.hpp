// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

namespace oodppo {

struct CommandOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  bool force = false;
  int threads = 1;
};

// Exit codes: 0 ok, 2 config error, 3 numeric divergence, 4 I/O error.
int cmd_train(const CommandOptions& opt);
int cmd_eval(const CommandOptions& opt);
int cmd_oodbench(const CommandOptions& opt);
int cmd_sweep(const CommandOptions& opt);

int exit_code_for_current_exception();

}  // namespace oodppo
