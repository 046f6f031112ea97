// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oodppo/agent.hpp"
#include "oodppo/rng.hpp"

namespace oodppo {

// Physics parameters shared by all environments. Defaults describe the
// unperturbed training environment.
struct EnvParams {
  double gravity = 1.0;     // pull toward the goal well (PointMass)
  double wind = 0.0;        // constant lateral force
  double friction = 1.0;    // velocity damping coefficient
  double body_scale = 1.0;  // action effectiveness factor
  int layout = 0;           // level layout (GridChase)

  bool operator==(const EnvParams&) const = default;
};

struct StepResult {
  std::vector<double> obs;
  double reward = 0.0;
  bool done = false;
};

class Env {
 public:
  virtual ~Env() = default;
  virtual int obs_dim() const = 0;
  virtual ActionSpace action_space() const = 0;
  virtual int horizon() const = 0;
  virtual std::vector<double> reset(Rng& rng) = 0;
  virtual StepResult step(const Action& action) = 0;
};

// 2-D point mass in a gravity well centered at the goal, with velocity
// damping and optional lateral wind. Observation: (pos, vel). Action: force
// in [-1, 1]^2. Reward: negative distance to the goal.
class PointMassEnv : public Env {
 public:
  explicit PointMassEnv(EnvParams params);
  int obs_dim() const override { return 4; }
  ActionSpace action_space() const override { return {SpaceKind::continuous, 2}; }
  int horizon() const override { return 200; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(const Action& action) override;

  void set_state(double px, double py, double vx, double vy);

  static constexpr double kDt = 0.05;

 private:
  std::vector<double> observe() const;
  EnvParams params_;
  double px_ = 0, py_ = 0, vx_ = 0, vy_ = 0;
  int t_ = 0;
};

// Grid navigation toward a fixed target with wall layouts as levels: the
// perturbed ("advanced level") variant swaps in an alternate wall layout.
// Observation: agent cell, target cell and 4 wall sensors, all in [0, 1].
class GridChaseEnv : public Env {
 public:
  explicit GridChaseEnv(EnvParams params);
  int obs_dim() const override { return 8; }
  ActionSpace action_space() const override { return {SpaceKind::discrete, 4}; }
  int horizon() const override { return 50; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(const Action& action) override;

  static constexpr int kSize = 8;
  bool wall_at(int x, int y) const;

 private:
  std::vector<double> observe() const;
  EnvParams params_;
  int ax_ = 0, ay_ = 0;
  int t_ = 0;
};

// One-step two-armed bandit: arm 0 pays 0, arm 1 pays 1.
class TwoArmBanditEnv : public Env {
 public:
  explicit TwoArmBanditEnv(EnvParams params) { (void)params; }
  int obs_dim() const override { return 1; }
  ActionSpace action_space() const override { return {SpaceKind::discrete, 2}; }
  int horizon() const override { return 1; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(const Action& action) override;

 private:
  double obs_ = 1.0;
};

std::unique_ptr<Env> make_env(const std::string& id, const EnvParams& params);
std::vector<std::string> env_ids();

// A sampled physics intervention. Absent fields stay at their defaults.
struct PerturbationConfig {
  std::optional<double> gravity;
  std::optional<double> wind;
  std::optional<double> friction;
  std::optional<double> body_scale;
  std::optional<int> layout;

  bool empty() const {
    return !gravity && !wind && !friction && !body_scale && !layout;
  }
  std::string describe() const;
};

// Which intervention axes a sampler may touch.
struct PerturbationAxes {
  bool gravity = true;
  bool wind = true;
  bool friction = true;
  bool body_scale = true;

  static PerturbationAxes all() { return {}; }
  static PerturbationAxes from_names(const std::vector<std::string>& names);
  std::vector<std::string> names() const;
};

// Independently include each enabled axis per a coin flip and sample its
// factor uniformly: gravity [0.5, 4], wind [0, 1], friction [0.1, 50],
// body_scale [1.5, 2.5]. Envs with layouts swap levels instead.
PerturbationConfig sample_perturbation(const std::string& env_id, const PerturbationAxes& axes,
                                       Rng& rng);
EnvParams apply_perturbation(const EnvParams& base, const PerturbationConfig& config);
EnvParams perturb(const EnvParams& base, const std::string& env_id, const PerturbationAxes& axes,
                  Rng& rng);

// Vectorized stepping with auto-reset and per-env episode accounting.
class VecEnv {
 public:
  VecEnv(const std::string& id, const EnvParams& params, int num_envs, std::uint64_t seed);

  int size() const { return static_cast<int>(envs_.size()); }
  int obs_dim() const { return envs_[0]->obs_dim(); }
  ActionSpace action_space() const { return envs_[0]->action_space(); }

  std::vector<std::vector<double>> reset_all();
  struct VecStep {
    std::vector<std::vector<double>> obs;  // post-auto-reset observations
    std::vector<double> rewards;
    std::vector<std::uint8_t> dones;
    // Completed episodes this step: (return, length) pairs.
    std::vector<std::pair<double, int>> finished;
  };
  VecStep step(const std::vector<Action>& actions);

 private:
  std::vector<std::unique_ptr<Env>> envs_;
  std::vector<Rng> rngs_;
  std::vector<double> ep_return_;
  std::vector<int> ep_len_;
};

}  // namespace oodppo
