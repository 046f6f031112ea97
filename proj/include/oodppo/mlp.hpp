// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "oodppo/rng.hpp"
#include "oodppo/tape.hpp"
#include "oodppo/tensor.hpp"

namespace oodppo {

// Fully-connected tanh network. weights[l] is [in, out]; biases[l] is
// [1, out]. Hidden layers use tanh, the head is linear.
struct Mlp {
  std::vector<Tensor> weights;
  std::vector<Tensor> biases;

  int num_layers() const { return static_cast<int>(weights.size()); }
  int in_dim() const { return weights.front().rows(); }
  int out_dim() const { return weights.back().cols(); }
};

// Xavier-uniform init with tanh gain; the head layer is scaled by head_gain
// (policy heads use a small gain so initial policies stay near-uniform).
Mlp make_mlp(int in_dim, const std::vector<int>& hidden, int out_dim, double head_gain, Rng& rng);

// Multiplicative noise applied to the net during one forward pass.
// unit_mult[i] scales the activations after hidden layer i+1 (row vectors;
// empty tensor = identity). weight_mult[i] scales the weight matrix leaving
// that activation (dropconnect; empty = identity).
struct LayerNoise {
  std::vector<Tensor> unit_mult;
  std::vector<Tensor> weight_mult;

  bool identity() const { return unit_mult.empty() && weight_mult.empty(); }
};

// Plain forward pass (no gradient recording).
Tensor mlp_forward(const Mlp& net, const Tensor& x, const LayerNoise& noise = {});

// Parameters of one net registered on a tape.
struct MlpNodes {
  std::vector<Tape::NodeId> weights;
  std::vector<Tape::NodeId> biases;
};

MlpNodes register_mlp(Tape& tape, const Mlp& net, bool requires_grad = true);

Tape::NodeId mlp_forward(Tape& tape, const MlpNodes& net, Tape::NodeId x,
                         const LayerNoise& noise = {});

}  // namespace oodppo
