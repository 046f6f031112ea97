// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace oodppo {

// Deterministic, platform-independent PRNG: xoshiro256++ seeded through
// SplitMix64. All randomness in the library flows through this type so that
// a 64-bit seed fully determines every run.
class Rng {
 public:
  Rng() : Rng(0) {}

  explicit Rng(std::uint64_t seed) : base_seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Log-uniform over [lo, hi], lo > 0.
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  // Standard normal via Box-Muller (cosine branch only; consumes two
  // uniforms per draw, no hidden state).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    return static_cast<int>(uniform() * static_cast<double>(n));
  }

  bool coin() { return (next_u64() >> 63) != 0; }

  // Independent child stream. Derivation uses the base seed, not the current
  // state, so streams do not depend on consumption order.
  Rng derive(std::uint64_t stream) const {
    std::uint64_t s = base_seed_ ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
    return Rng(splitmix64(s));
  }

  Rng derive(std::uint64_t a, std::uint64_t b) const {
    return derive(a).derive(b);
  }

  std::uint64_t base_seed() const { return base_seed_; }

  std::array<std::uint64_t, 5> serialize() const {
    return {base_seed_, state_[0], state_[1], state_[2], state_[3]};
  }

  static Rng deserialize(const std::array<std::uint64_t, 5>& words) {
    Rng r;
    r.base_seed_ = words[0];
    r.state_ = {words[1], words[2], words[3], words[4]};
    return r;
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t base_seed_ = 0;
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace oodppo
