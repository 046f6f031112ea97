// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "oodppo/tensor.hpp"

namespace oodppo {

// Adam with bias correction. One state per parameter array; `t` counts
// completed steps across the whole parameter set.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  long long t = 0;

  static AdamState like(const std::vector<Tensor*>& params);
};

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
               AdamState& state, const AdamConfig& cfg);

// If the global L2 norm of `grads` exceeds max_norm, scale all of them by
// max_norm / norm. Returns the pre-clip norm.
double clip_global_norm(std::vector<Tensor>& grads, double max_norm);

}  // namespace oodppo
