// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/envs.hpp"

#include <cmath>
#include <sstream>

#include "oodppo/errors.hpp"

namespace oodppo {

namespace {

double clampd(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

const std::vector<double>& continuous_action(const Action& a, int n) {
  const auto* v = std::get_if<std::vector<double>>(&a);
  if (!v || static_cast<int>(v->size()) != n)
    throw ConfigError("env: continuous action of wrong arity");
  for (double x : *v)
    if (!std::isfinite(x)) throw ConfigError("env: non-finite action component");
  return *v;
}

int discrete_action(const Action& a, int n) {
  const int* idx = std::get_if<int>(&a);
  if (!idx || *idx < 0 || *idx >= n) throw ConfigError("env: discrete action out of range");
  return *idx;
}

}  // namespace

// ---------------------------------------------------------------------------
// PointMass

PointMassEnv::PointMassEnv(EnvParams params) : params_(params) {
  if (params_.gravity <= 0 || params_.friction <= 0 || params_.body_scale <= 0 ||
      params_.wind < 0)
    throw ConfigError("pointmass: invalid physics parameters");
}

std::vector<double> PointMassEnv::observe() const { return {px_, py_, vx_, vy_}; }

std::vector<double> PointMassEnv::reset(Rng& rng) {
  px_ = 1.0 + rng.uniform(-0.1, 0.1);
  py_ = 1.0 + rng.uniform(-0.1, 0.1);
  vx_ = rng.uniform(-0.1, 0.1);
  vy_ = rng.uniform(-0.1, 0.1);
  t_ = 0;
  return observe();
}

void PointMassEnv::set_state(double px, double py, double vx, double vy) {
  px_ = px;
  py_ = py;
  vx_ = vx;
  vy_ = vy;
}

StepResult PointMassEnv::step(const Action& action) {
  const std::vector<double>& a = continuous_action(action, 2);
  const double fx = clampd(a[0], -1.0, 1.0) * params_.body_scale;
  const double fy = clampd(a[1], -1.0, 1.0) * params_.body_scale;
  // Damping integrated exactly (exp(-friction*dt)) so that the high-friction
  // regime stays stable; forces enter explicitly. The gravity well pulls the
  // mass toward the goal at the origin and vanishes there.
  const double damp = std::exp(-params_.friction * kDt);
  const double gx = -params_.gravity * px_;
  const double gy = -params_.gravity * py_;
  vx_ = vx_ * damp + (fx + gx + params_.wind) * kDt;
  vy_ = vy_ * damp + (fy + gy) * kDt;
  px_ += vx_ * kDt;
  py_ += vy_ * kDt;
  ++t_;
  StepResult r;
  r.obs = observe();
  r.reward = -std::sqrt(px_ * px_ + py_ * py_);
  r.done = t_ >= horizon();
  return r;
}

// ---------------------------------------------------------------------------
// GridChase

namespace {

// Layout 0 (training) and layout 1 (the alternate level used as the OOD
// analog). '#' marks walls; the target sits at (6, 6) in both.
constexpr const char* kLayouts[2][GridChaseEnv::kSize] = {
    {
        "........",
        "..##....",
        "..##....",
        "........",
        "....##..",
        "....##..",
        "........",
        "........",
    },
    {
        "........",
        ".....##.",
        "..#..##.",
        "..#.....",
        "..#..#..",
        ".....#..",
        ".##..#..",
        "........",
    },
};

constexpr int kTargetX = 6;
constexpr int kTargetY = 6;

}  // namespace

GridChaseEnv::GridChaseEnv(EnvParams params) : params_(params) {
  if (params_.layout < 0 || params_.layout > 1)
    throw ConfigError("gridchase: unknown layout");
}

bool GridChaseEnv::wall_at(int x, int y) const {
  if (x < 0 || y < 0 || x >= kSize || y >= kSize) return true;
  return kLayouts[params_.layout][y][x] == '#';
}

std::vector<double> GridChaseEnv::observe() const {
  const double s = kSize - 1;
  return {ax_ / s,
          ay_ / s,
          kTargetX / s,
          kTargetY / s,
          wall_at(ax_, ay_ - 1) ? 1.0 : 0.0,
          wall_at(ax_, ay_ + 1) ? 1.0 : 0.0,
          wall_at(ax_ - 1, ay_) ? 1.0 : 0.0,
          wall_at(ax_ + 1, ay_) ? 1.0 : 0.0};
}

std::vector<double> GridChaseEnv::reset(Rng& rng) {
  do {
    ax_ = rng.uniform_int(kSize);
    ay_ = rng.uniform_int(kSize);
  } while (wall_at(ax_, ay_) || (ax_ == kTargetX && ay_ == kTargetY));
  t_ = 0;
  return observe();
}

StepResult GridChaseEnv::step(const Action& action) {
  static constexpr int dx[4] = {0, 0, -1, 1};
  static constexpr int dy[4] = {-1, 1, 0, 0};
  const int a = discrete_action(action, 4);
  const int nx = ax_ + dx[a];
  const int ny = ay_ + dy[a];
  if (!wall_at(nx, ny)) {
    ax_ = nx;
    ay_ = ny;
  }
  ++t_;
  StepResult r;
  r.obs = observe();
  if (ax_ == kTargetX && ay_ == kTargetY) {
    r.reward = 1.0;
    r.done = true;
  } else {
    r.reward = -0.01;
    r.done = t_ >= horizon();
  }
  return r;
}

// ---------------------------------------------------------------------------
// TwoArmBandit

std::vector<double> TwoArmBanditEnv::reset(Rng& rng) {
  obs_ = 1.0 + rng.uniform(-0.1, 0.1);
  return {obs_};
}

StepResult TwoArmBanditEnv::step(const Action& action) {
  const int a = discrete_action(action, 2);
  StepResult r;
  r.obs = {obs_};
  r.reward = (a == 1) ? 1.0 : 0.0;
  r.done = true;
  return r;
}

// ---------------------------------------------------------------------------
// Registry, perturbations, vectorization

std::unique_ptr<Env> make_env(const std::string& id, const EnvParams& params) {
  if (id == "pointmass") return std::make_unique<PointMassEnv>(params);
  if (id == "gridchase") return std::make_unique<GridChaseEnv>(params);
  if (id == "bandit2") return std::make_unique<TwoArmBanditEnv>(params);
  throw ConfigError("unknown env id: " + id);
}

std::vector<std::string> env_ids() { return {"pointmass", "gridchase", "bandit2"}; }

std::string PerturbationConfig::describe() const {
  std::ostringstream os;
  if (gravity) os << "gravity=" << *gravity << ";";
  if (wind) os << "wind=" << *wind << ";";
  if (friction) os << "friction=" << *friction << ";";
  if (body_scale) os << "body_scale=" << *body_scale << ";";
  if (layout) os << "layout=" << *layout << ";";
  if (empty()) os << "none;";
  return os.str();
}

PerturbationAxes PerturbationAxes::from_names(const std::vector<std::string>& names) {
  PerturbationAxes axes;
  axes.gravity = axes.wind = axes.friction = axes.body_scale = false;
  for (const std::string& n : names) {
    if (n == "gravity") axes.gravity = true;
    else if (n == "wind") axes.wind = true;
    else if (n == "friction") axes.friction = true;
    else if (n == "body_scale") axes.body_scale = true;
    else throw ConfigError("unknown perturbation axis: " + n);
  }
  return axes;
}

std::vector<std::string> PerturbationAxes::names() const {
  std::vector<std::string> out;
  if (gravity) out.push_back("gravity");
  if (wind) out.push_back("wind");
  if (friction) out.push_back("friction");
  if (body_scale) out.push_back("body_scale");
  return out;
}

PerturbationConfig sample_perturbation(const std::string& env_id, const PerturbationAxes& axes,
                                       Rng& rng) {
  PerturbationConfig cfg;
  if (env_id == "gridchase") {
    if (rng.coin()) cfg.layout = 1;
    return cfg;
  }
  if (axes.gravity && rng.coin()) cfg.gravity = rng.uniform(0.5, 4.0);
  if (axes.wind && rng.coin()) cfg.wind = rng.uniform(0.0, 1.0);
  if (axes.friction && rng.coin()) cfg.friction = rng.uniform(0.1, 50.0);
  if (axes.body_scale && rng.coin()) cfg.body_scale = rng.uniform(1.5, 2.5);
  return cfg;
}

EnvParams apply_perturbation(const EnvParams& base, const PerturbationConfig& config) {
  EnvParams p = base;
  if (config.gravity) p.gravity = *config.gravity;
  if (config.wind) p.wind = *config.wind;
  if (config.friction) p.friction = *config.friction;
  if (config.body_scale) p.body_scale = *config.body_scale;
  if (config.layout) p.layout = *config.layout;
  return p;
}

EnvParams perturb(const EnvParams& base, const std::string& env_id, const PerturbationAxes& axes,
                  Rng& rng) {
  return apply_perturbation(base, sample_perturbation(env_id, axes, rng));
}

VecEnv::VecEnv(const std::string& id, const EnvParams& params, int num_envs, std::uint64_t seed) {
  if (num_envs < 1) throw ConfigError("VecEnv: need at least one env");
  Rng root(seed);
  for (int i = 0; i < num_envs; ++i) {
    envs_.push_back(make_env(id, params));
    rngs_.push_back(root.derive(0x656e76ULL, static_cast<std::uint64_t>(i)));
  }
  ep_return_.assign(num_envs, 0.0);
  ep_len_.assign(num_envs, 0);
}

std::vector<std::vector<double>> VecEnv::reset_all() {
  std::vector<std::vector<double>> obs(envs_.size());
  for (std::size_t i = 0; i < envs_.size(); ++i) {
    obs[i] = envs_[i]->reset(rngs_[i]);
    ep_return_[i] = 0.0;
    ep_len_[i] = 0;
  }
  return obs;
}

VecEnv::VecStep VecEnv::step(const std::vector<Action>& actions) {
  if (actions.size() != envs_.size()) throw ConfigError("VecEnv::step: batch width mismatch");
  VecStep out;
  out.obs.resize(envs_.size());
  out.rewards.resize(envs_.size());
  out.dones.resize(envs_.size());
  for (std::size_t i = 0; i < envs_.size(); ++i) {
    StepResult r = envs_[i]->step(actions[i]);
    ep_return_[i] += r.reward;
    ep_len_[i] += 1;
    out.rewards[i] = r.reward;
    out.dones[i] = r.done ? 1 : 0;
    if (r.done) {
      out.finished.emplace_back(ep_return_[i], ep_len_[i]);
      ep_return_[i] = 0.0;
      ep_len_[i] = 0;
      out.obs[i] = envs_[i]->reset(rngs_[i]);
    } else {
      out.obs[i] = std::move(r.obs);
    }
  }
  return out;
}

}  // namespace oodppo
