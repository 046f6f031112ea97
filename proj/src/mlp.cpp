// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/mlp.hpp"

#include <cmath>

#include "oodppo/errors.hpp"

namespace oodppo {

namespace {

Tensor xavier_uniform(int in_dim, int out_dim, double gain, Rng& rng) {
  const double a = gain * std::sqrt(6.0 / (in_dim + out_dim));
  Tensor w(in_dim, out_dim);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-a, a);
  return w;
}

}  // namespace

Mlp make_mlp(int in_dim, const std::vector<int>& hidden, int out_dim, double head_gain, Rng& rng) {
  if (in_dim < 1 || out_dim < 1) throw ConfigError("make_mlp: invalid dimensions");
  constexpr double kTanhGain = 5.0 / 3.0;
  Mlp net;
  int prev = in_dim;
  for (int h : hidden) {
    if (h < 1) throw ConfigError("make_mlp: hidden width must be positive");
    net.weights.push_back(xavier_uniform(prev, h, kTanhGain, rng));
    net.biases.push_back(Tensor::zeros(1, h));
    prev = h;
  }
  net.weights.push_back(xavier_uniform(prev, out_dim, head_gain, rng));
  net.biases.push_back(Tensor::zeros(1, out_dim));
  return net;
}

Tensor mlp_forward(const Mlp& net, const Tensor& x, const LayerNoise& noise) {
  if (x.cols() != net.in_dim())
    throw ConfigError("mlp_forward: input width does not match first layer");
  const int layers = net.num_layers();
  Tensor h = x;
  for (int l = 0; l < layers; ++l) {
    Tensor w = net.weights[l];
    if (l >= 1 && l - 1 < static_cast<int>(noise.weight_mult.size()) &&
        !noise.weight_mult[l - 1].empty())
      w = mul(w, noise.weight_mult[l - 1]);
    h = add_row(matmul(h, w), net.biases[l]);
    if (l + 1 < layers) {
      h = tanh_map(h);
      if (l < static_cast<int>(noise.unit_mult.size()) && !noise.unit_mult[l].empty())
        h = mul_row(h, noise.unit_mult[l]);
    }
  }
  return h;
}

MlpNodes register_mlp(Tape& tape, const Mlp& net, bool requires_grad) {
  MlpNodes nodes;
  for (int l = 0; l < net.num_layers(); ++l) {
    nodes.weights.push_back(tape.input(net.weights[l], requires_grad));
    nodes.biases.push_back(tape.input(net.biases[l], requires_grad));
  }
  return nodes;
}

Tape::NodeId mlp_forward(Tape& tape, const MlpNodes& net, Tape::NodeId x,
                         const LayerNoise& noise) {
  const int layers = static_cast<int>(net.weights.size());
  Tape::NodeId h = x;
  for (int l = 0; l < layers; ++l) {
    Tape::NodeId w = net.weights[l];
    if (l >= 1 && l - 1 < static_cast<int>(noise.weight_mult.size()) &&
        !noise.weight_mult[l - 1].empty())
      w = tape.mul_const(w, noise.weight_mult[l - 1]);
    h = tape.add_row(tape.matmul(h, w), net.biases[l]);
    if (l + 1 < layers) {
      h = tape.tanh_(h);
      if (l < static_cast<int>(noise.unit_mult.size()) && !noise.unit_mult[l].empty())
        h = tape.mul_row(h, tape.input(noise.unit_mult[l], false));
    }
  }
  return h;
}

}  // namespace oodppo
