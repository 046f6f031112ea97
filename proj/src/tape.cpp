// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/tape.hpp"

#include <cmath>
#include <utility>

#include "oodppo/errors.hpp"

namespace oodppo {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw ConfigError(msg);
}

// Numerically stable per-row softmax and log-sum-exp.
void softmax_rows(const Tensor& logits, Tensor& probs, std::vector<double>* lse) {
  probs = logits;
  if (lse) lse->assign(logits.rows(), 0.0);
  for (int i = 0; i < logits.rows(); ++i) {
    double mx = logits(i, 0);
    for (int j = 1; j < logits.cols(); ++j) mx = std::max(mx, logits(i, j));
    double s = 0.0;
    for (int j = 0; j < logits.cols(); ++j) {
      const double e = std::exp(logits(i, j) - mx);
      probs(i, j) = e;
      s += e;
    }
    for (int j = 0; j < logits.cols(); ++j) probs(i, j) /= s;
    if (lse) (*lse)[i] = mx + std::log(s);
  }
}

}  // namespace

Tape::NodeId Tape::push(Tensor value, bool requires_grad,
                        std::function<void(Tape&, const Tensor&)> backward) {
  nodes_.push_back(Node{std::move(value), requires_grad, std::move(backward)});
  grads_.emplace_back();
  return static_cast<NodeId>(nodes_.size()) - 1;
}

void Tape::accumulate(NodeId id, const Tensor& g) {
  if (!nodes_[id].requires_grad) return;
  if (grads_[id].empty()) {
    grads_[id] = g;
  } else {
    axpy(grads_[id], g);
  }
}

Tape::NodeId Tape::input(Tensor value, bool requires_grad) {
  return push(std::move(value), requires_grad, nullptr);
}

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
  Tensor out = oodppo::matmul(value(a), value(b));
  const bool rg = requires_grad(a) || requires_grad(b);
  return push(std::move(out), rg, [a, b](Tape& t, const Tensor& gout) {
    t.accumulate(a, oodppo::matmul(gout, transpose(t.value(b))));
    t.accumulate(b, oodppo::matmul(transpose(t.value(a)), gout));
  });
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  Tensor out = oodppo::add(value(a), value(b));
  return push(std::move(out), requires_grad(a) || requires_grad(b),
              [a, b](Tape& t, const Tensor& gout) {
                t.accumulate(a, gout);
                t.accumulate(b, gout);
              });
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
  Tensor out = oodppo::sub(value(a), value(b));
  return push(std::move(out), requires_grad(a) || requires_grad(b),
              [a, b](Tape& t, const Tensor& gout) {
                t.accumulate(a, gout);
                t.accumulate(b, oodppo::scale(gout, -1.0));
              });
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
  Tensor out = oodppo::mul(value(a), value(b));
  return push(std::move(out), requires_grad(a) || requires_grad(b),
              [a, b](Tape& t, const Tensor& gout) {
                t.accumulate(a, oodppo::mul(gout, t.value(b)));
                t.accumulate(b, oodppo::mul(gout, t.value(a)));
              });
}

Tape::NodeId Tape::add_row(NodeId a, NodeId row) {
  Tensor out = oodppo::add_row(value(a), value(row));
  return push(std::move(out), requires_grad(a) || requires_grad(row),
              [a, row](Tape& t, const Tensor& gout) {
                t.accumulate(a, gout);
                t.accumulate(row, colsum(gout));
              });
}

Tape::NodeId Tape::mul_row(NodeId a, NodeId row) {
  Tensor out = oodppo::mul_row(value(a), value(row));
  return push(std::move(out), requires_grad(a) || requires_grad(row),
              [a, row](Tape& t, const Tensor& gout) {
                t.accumulate(a, oodppo::mul_row(gout, t.value(row)));
                t.accumulate(row, colsum(oodppo::mul(gout, t.value(a))));
              });
}

Tape::NodeId Tape::scale(NodeId a, double c) {
  return push(oodppo::scale(value(a), c), requires_grad(a),
              [a, c](Tape& t, const Tensor& gout) { t.accumulate(a, oodppo::scale(gout, c)); });
}

Tape::NodeId Tape::add_const(NodeId a, double c) {
  return push(oodppo::add_const(value(a), c), requires_grad(a),
              [a](Tape& t, const Tensor& gout) { t.accumulate(a, gout); });
}

Tape::NodeId Tape::tanh_(NodeId a) {
  Tensor out = tanh_map(value(a));
  NodeId id = push(std::move(out), requires_grad(a), nullptr);
  nodes_[id].backward = [a, id](Tape& t, const Tensor& gout) {
    const Tensor& y = t.value(id);
    Tensor g = gout;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= 1.0 - y[i] * y[i];
    t.accumulate(a, g);
  };
  return id;
}

Tape::NodeId Tape::exp_(NodeId a) {
  Tensor out = exp_map(value(a));
  NodeId id = push(std::move(out), requires_grad(a), nullptr);
  nodes_[id].backward = [a, id](Tape& t, const Tensor& gout) {
    t.accumulate(a, oodppo::mul(gout, t.value(id)));
  };
  return id;
}

Tape::NodeId Tape::square(NodeId a) {
  Tensor out = oodppo::mul(value(a), value(a));
  return push(std::move(out), requires_grad(a), [a](Tape& t, const Tensor& gout) {
    Tensor g = oodppo::mul(gout, t.value(a));
    t.accumulate(a, oodppo::scale(g, 2.0));
  });
}

Tape::NodeId Tape::clamp(NodeId a, double lo, double hi) {
  Tensor out = clamp_map(value(a), lo, hi);
  return push(std::move(out), requires_grad(a), [a, lo, hi](Tape& t, const Tensor& gout) {
    const Tensor& x = t.value(a);
    Tensor g = gout;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (x[i] < lo || x[i] > hi) g[i] = 0.0;
    t.accumulate(a, g);
  });
}

Tape::NodeId Tape::minimum(NodeId a, NodeId b) {
  Tensor out = oodppo::minimum(value(a), value(b));
  return push(std::move(out), requires_grad(a) || requires_grad(b),
              [a, b](Tape& t, const Tensor& gout) {
                const Tensor& xa = t.value(a);
                const Tensor& xb = t.value(b);
                Tensor ga = gout, gb = gout;
                for (std::size_t i = 0; i < gout.size(); ++i) {
                  if (xa[i] <= xb[i]) gb[i] = 0.0; else ga[i] = 0.0;
                }
                t.accumulate(a, ga);
                t.accumulate(b, gb);
              });
}

Tape::NodeId Tape::mul_const(NodeId a, const Tensor& t) {
  Tensor out = oodppo::mul(value(a), t);
  Tensor c = t;
  return push(std::move(out), requires_grad(a), [a, c](Tape& tp, const Tensor& gout) {
    tp.accumulate(a, oodppo::mul(gout, c));
  });
}

Tape::NodeId Tape::axpy_const(NodeId a, const Tensor& t, double alpha) {
  Tensor out = value(a);
  axpy(out, t, alpha);
  return push(std::move(out), requires_grad(a),
              [a](Tape& tp, const Tensor& gout) { tp.accumulate(a, gout); });
}

Tape::NodeId Tape::sum_all(NodeId a) {
  Tensor out = Tensor::scalar(oodppo::sum_all(value(a)));
  return push(std::move(out), requires_grad(a), [a](Tape& t, const Tensor& gout) {
    const Tensor& x = t.value(a);
    t.accumulate(a, Tensor::full(x.rows(), x.cols(), gout.item()));
  });
}

Tape::NodeId Tape::mean_all(NodeId a) {
  Tensor out = Tensor::scalar(oodppo::mean_all(value(a)));
  return push(std::move(out), requires_grad(a), [a](Tape& t, const Tensor& gout) {
    const Tensor& x = t.value(a);
    const double g = gout.item() / static_cast<double>(x.size());
    t.accumulate(a, Tensor::full(x.rows(), x.cols(), g));
  });
}

Tape::NodeId Tape::select_rows(const std::vector<NodeId>& srcs, const std::vector<int>& choice) {
  require(!srcs.empty(), "select_rows: no sources");
  const Tensor& first = value(srcs[0]);
  require(static_cast<int>(choice.size()) == first.rows(), "select_rows: choice length != batch");
  bool rg = false;
  for (NodeId s : srcs) {
    require(value(s).same_shape(first), "select_rows: source shape mismatch");
    rg = rg || requires_grad(s);
  }
  Tensor out(first.rows(), first.cols());
  for (int b = 0; b < first.rows(); ++b) {
    const int s = choice[b];
    require(s >= 0 && s < static_cast<int>(srcs.size()), "select_rows: choice out of range");
    const Tensor& src = value(srcs[s]);
    for (int j = 0; j < first.cols(); ++j) out(b, j) = src(b, j);
  }
  std::vector<NodeId> srcs_copy = srcs;
  std::vector<int> choice_copy = choice;
  return push(std::move(out), rg, [srcs_copy, choice_copy](Tape& t, const Tensor& gout) {
    for (std::size_t s = 0; s < srcs_copy.size(); ++s) {
      if (!t.requires_grad(srcs_copy[s])) continue;
      Tensor g(gout.rows(), gout.cols());
      bool any = false;
      for (int b = 0; b < gout.rows(); ++b) {
        if (choice_copy[b] != static_cast<int>(s)) continue;
        any = true;
        for (int j = 0; j < gout.cols(); ++j) g(b, j) = gout(b, j);
      }
      if (any) t.accumulate(srcs_copy[s], g);
    }
  });
}

Tape::NodeId Tape::categorical_logprob(NodeId logits, const std::vector<int>& actions) {
  const Tensor& z = value(logits);
  require(static_cast<int>(actions.size()) == z.rows(), "categorical_logprob: batch mismatch");
  Tensor probs;
  std::vector<double> lse;
  softmax_rows(z, probs, &lse);
  Tensor out(z.rows(), 1);
  for (int b = 0; b < z.rows(); ++b) {
    const int a = actions[b];
    require(a >= 0 && a < z.cols(), "categorical_logprob: action index out of range");
    out(b, 0) = z(b, a) - lse[b];
  }
  std::vector<int> acts = actions;
  return push(std::move(out), requires_grad(logits),
              [logits, acts, probs](Tape& t, const Tensor& gout) {
                Tensor g(probs.rows(), probs.cols());
                for (int b = 0; b < probs.rows(); ++b) {
                  const double gb = gout(b, 0);
                  for (int j = 0; j < probs.cols(); ++j)
                    g(b, j) = gb * ((j == acts[b] ? 1.0 : 0.0) - probs(b, j));
                }
                t.accumulate(logits, g);
              });
}

Tape::NodeId Tape::categorical_entropy(NodeId logits) {
  const Tensor& z = value(logits);
  Tensor probs;
  softmax_rows(z, probs, nullptr);
  Tensor out(z.rows(), 1);
  for (int b = 0; b < z.rows(); ++b) {
    double h = 0.0;
    for (int j = 0; j < z.cols(); ++j) {
      const double p = probs(b, j);
      if (p > 0.0) h -= p * std::log(p);
    }
    out(b, 0) = h;
  }
  Tensor ent = out;
  return push(std::move(out), requires_grad(logits),
              [logits, probs, ent](Tape& t, const Tensor& gout) {
                // dH/dz_j = -p_j (log p_j + H)
                Tensor g(probs.rows(), probs.cols());
                for (int b = 0; b < probs.rows(); ++b) {
                  const double gb = gout(b, 0);
                  for (int j = 0; j < probs.cols(); ++j) {
                    const double p = probs(b, j);
                    g(b, j) = (p > 0.0) ? -gb * p * (std::log(p) + ent(b, 0)) : 0.0;
                  }
                }
                t.accumulate(logits, g);
              });
}

Tape::NodeId Tape::gaussian_logprob(NodeId mean, NodeId log_std, const Tensor& actions) {
  static constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
  const Tensor& mu = value(mean);
  const Tensor& ls = value(log_std);
  require(actions.same_shape(mu), "gaussian_logprob: action shape mismatch");
  require(ls.rows() == 1 && ls.cols() == mu.cols(), "gaussian_logprob: log_std shape mismatch");
  const int n = mu.cols();
  Tensor out(mu.rows(), 1);
  for (int b = 0; b < mu.rows(); ++b) {
    double lp = -0.5 * n * kLogTwoPi;
    for (int j = 0; j < n; ++j) {
      const double sd = std::exp(ls(0, j));
      const double z = (actions(b, j) - mu(b, j)) / sd;
      lp += -0.5 * z * z - ls(0, j);
    }
    out(b, 0) = lp;
  }
  Tensor acts = actions;
  return push(std::move(out), requires_grad(mean) || requires_grad(log_std),
              [mean, log_std, acts](Tape& t, const Tensor& gout) {
                const Tensor& mu = t.value(mean);
                const Tensor& ls = t.value(log_std);
                Tensor gmu(mu.rows(), mu.cols());
                Tensor gls(1, ls.cols());
                for (int b = 0; b < mu.rows(); ++b) {
                  const double gb = gout(b, 0);
                  for (int j = 0; j < mu.cols(); ++j) {
                    const double sd = std::exp(ls(0, j));
                    const double z = (acts(b, j) - mu(b, j)) / sd;
                    gmu(b, j) = gb * z / sd;
                    gls(0, j) += gb * (z * z - 1.0);
                  }
                }
                t.accumulate(mean, gmu);
                t.accumulate(log_std, gls);
              });
}

std::vector<Tensor> Tape::gradients(NodeId loss, const std::vector<NodeId>& leaves) {
  const Tensor& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1)
    throw ConfigError("Tape::gradients: loss must be a scalar");
  for (auto& g : grads_) g = Tensor();
  grads_[loss] = Tensor::scalar(1.0);
  for (NodeId id = loss; id >= 0; --id) {
    if (grads_[id].empty() || !nodes_[id].backward) continue;
    nodes_[id].backward(*this, grads_[id]);
  }
  std::vector<Tensor> out;
  out.reserve(leaves.size());
  for (NodeId leaf : leaves) {
    if (grads_[leaf].empty()) {
      const Tensor& v = value(leaf);
      out.push_back(Tensor::zeros(v.rows(), v.cols()));
    } else {
      out.push_back(grads_[leaf]);
    }
  }
  return out;
}

}  // namespace oodppo
