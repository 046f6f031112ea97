// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "oodppo/tensor.hpp"

namespace oodppo {

// Reverse-mode gradient tape over Tensor primitives. Nodes are created in
// topological order (parents always precede children); backward() replays
// the tape in reverse. The tape owns every intermediate value, so node ids
// stay valid across vector growth.
class Tape {
 public:
  using NodeId = int;

  // Leaf node. Gradients are only accumulated into nodes created with
  // requires_grad = true (and anything computed from them).
  NodeId input(Tensor value, bool requires_grad);

  NodeId matmul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId add_row(NodeId a, NodeId row);  // row [1,n] broadcast over rows of a
  NodeId mul_row(NodeId a, NodeId row);
  NodeId scale(NodeId a, double c);
  NodeId add_const(NodeId a, double c);
  NodeId tanh_(NodeId a);
  NodeId exp_(NodeId a);
  NodeId square(NodeId a);
  NodeId clamp(NodeId a, double lo, double hi);
  NodeId minimum(NodeId a, NodeId b);
  NodeId mul_const(NodeId a, const Tensor& t);   // elementwise by a constant tensor
  NodeId axpy_const(NodeId a, const Tensor& t, double alpha);  // a + alpha * t
  NodeId sum_all(NodeId a);   // -> [1,1]
  NodeId mean_all(NodeId a);  // -> [1,1]

  // Row b of the output is row b of value(srcs[choice[b]]). All sources must
  // share the output shape.
  NodeId select_rows(const std::vector<NodeId>& srcs, const std::vector<int>& choice);

  // log softmax(logits)[b, actions[b]] -> [batch, 1]
  NodeId categorical_logprob(NodeId logits, const std::vector<int>& actions);
  // -sum_j p log p per row (natural log) -> [batch, 1]
  NodeId categorical_entropy(NodeId logits);
  // Diagonal Gaussian log density of `actions` rows under (mean, exp(log_std)).
  // log_std is a [1, n] node shared across the batch. -> [batch, 1]
  NodeId gaussian_logprob(NodeId mean, NodeId log_std, const Tensor& actions);

  const Tensor& value(NodeId id) const { return nodes_[id].value; }
  bool requires_grad(NodeId id) const { return nodes_[id].requires_grad; }

  // Backpropagate from a scalar loss node; returns one gradient per
  // requested leaf (zeros when the leaf does not influence the loss).
  std::vector<Tensor> gradients(NodeId loss, const std::vector<NodeId>& leaves);

 private:
  struct Node {
    Tensor value;
    bool requires_grad = false;
    std::function<void(Tape&, const Tensor&)> backward;  // gout -> accumulate into parents
  };

  NodeId push(Tensor value, bool requires_grad, std::function<void(Tape&, const Tensor&)> backward);
  void accumulate(NodeId id, const Tensor& g);

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;  // lazily shaped; empty means "no gradient yet"
};

}  // namespace oodppo
