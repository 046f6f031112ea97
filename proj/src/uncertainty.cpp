// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "oodppo/errors.hpp"
#include "oodppo/tensor.hpp"

namespace oodppo {

namespace {

constexpr double kProbFloor = 1e-12;

void require_k(std::size_t k) {
  if (k < 2) throw ConfigError("uncertainty: at least two submodels required");
}

double kl_clamped(const std::vector<double>& p, const std::vector<double>& q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = std::max(p[i], kProbFloor);
    const double qi = std::max(q[i], kProbFloor);
    kl += pi * std::log(pi / qi);
  }
  return kl;
}

// Mean over coordinates of the per-coordinate population std across rows.
double mean_coordinate_std(const std::vector<std::vector<double>>& rows) {
  require_k(rows.size());
  const std::size_t n = rows[0].size();
  for (const auto& r : rows)
    if (r.size() != n) throw ConfigError("uncertainty: mismatched vector lengths");
  std::vector<double> col(rows.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) col[i] = rows[i][j];
    acc += pop_std(col);
  }
  return acc / static_cast<double>(n);
}

}  // namespace

double value_uncertainty(const std::vector<double>& values) {
  require_k(values.size());
  return pop_std(values);
}

double policy_uncertainty_std_continuous(const std::vector<std::vector<double>>& means) {
  return mean_coordinate_std(means);
}

double policy_uncertainty_std_categorical(const std::vector<std::vector<double>>& logits,
                                          bool on_probs) {
  if (!on_probs) return mean_coordinate_std(logits);
  std::vector<std::vector<double>> probs;
  probs.reserve(logits.size());
  for (const auto& l : logits) probs.push_back(softmax(l));
  return mean_coordinate_std(probs);
}

namespace {

std::vector<double> averaged_distribution(const std::vector<Categorical>& dists) {
  if (dists.empty()) throw ConfigError("uncertainty: no distributions");
  const int n = dists[0].size();
  std::vector<double> avg(n, 0.0);
  for (const Categorical& d : dists) {
    if (d.size() != n) throw ConfigError("uncertainty: mismatched action counts");
    const std::vector<double> p = d.probs();
    for (int j = 0; j < n; ++j) avg[j] += p[j] / static_cast<double>(dists.size());
  }
  return avg;
}

}  // namespace

double max_prob_uncertainty(const std::vector<Categorical>& dists) {
  const std::vector<double> avg = averaged_distribution(dists);
  return 1.0 - *std::max_element(avg.begin(), avg.end());
}

double entropy_uncertainty(const std::vector<Categorical>& dists) {
  const std::vector<double> avg = averaged_distribution(dists);
  double h = 0.0;
  for (double p : avg)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double policy_uncertainty_js_categorical(const std::vector<Categorical>& dists) {
  require_k(dists.size());
  std::vector<std::vector<double>> probs;
  probs.reserve(dists.size());
  for (const Categorical& d : dists) probs.push_back(d.probs());
  double best = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i)
    for (std::size_t j = i + 1; j < probs.size(); ++j) {
      const double js = 0.5 * (kl_clamped(probs[i], probs[j]) + kl_clamped(probs[j], probs[i]));
      best = std::max(best, js);
    }
  return best;
}

double policy_uncertainty_js_continuous(const std::vector<std::vector<double>>& means,
                                        const std::vector<double>& sigma) {
  require_k(means.size());
  const std::size_t n = means[0].size();
  if (sigma.size() != n) throw ConfigError("uncertainty: sigma length mismatch");
  for (double s : sigma)
    if (s <= 0.0) throw ConfigError("uncertainty: sigma entries must be positive");
  bool scalar_sigma = true;
  for (double s : sigma) scalar_sigma = scalar_sigma && (s == sigma[0]);

  double best = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i)
    for (std::size_t j = i + 1; j < means.size(); ++j) {
      if (means[i].size() != n || means[j].size() != n)
        throw ConfigError("uncertainty: mismatched mean lengths");
      double js = 0.0;
      if (scalar_sigma) {
        double sq = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
          const double diff = means[i][d] - means[j][d];
          sq += diff * diff;
        }
        js = sigma[0] * sq;
      } else {
        for (std::size_t d = 0; d < n; ++d) {
          const double diff = means[i][d] - means[j][d];
          js += 0.5 * diff * diff / sigma[d];
        }
      }
      best = std::max(best, js);
    }
  return best;
}

UncertaintyReport evaluate_uncertainty(const SubmodelBundle& bundle, int row,
                                       const UncertaintyOptions& opt) {
  require_k(bundle.k());
  UncertaintyReport rep;
  rep.value_u = value_uncertainty(bundle.state_values(row));
  if (bundle.kind == SpaceKind::discrete) {
    std::vector<std::vector<double>> logits(bundle.k());
    std::vector<Categorical> dists(bundle.k());
    for (int i = 0; i < bundle.k(); ++i) {
      dists[i] = bundle.categorical(i, row);
      logits[i] = dists[i].logits;
    }
    rep.policy_u_std = policy_uncertainty_std_categorical(logits, opt.cat_std_on_probs);
    rep.policy_u_js = policy_uncertainty_js_categorical(dists);
    rep.max_prob_u = max_prob_uncertainty(dists);
    rep.entropy_u = entropy_uncertainty(dists);
  } else {
    std::vector<std::vector<double>> means(bundle.k());
    for (int i = 0; i < bundle.k(); ++i) means[i] = bundle.gaussian(i, row).mean;
    rep.policy_u_std = policy_uncertainty_std_continuous(means);
    std::vector<double> sigma(bundle.log_std.size());
    for (std::size_t d = 0; d < sigma.size(); ++d) {
      const double sd = std::exp(bundle.log_std[d]);
      sigma[d] = sd * sd;
    }
    rep.policy_u_js = policy_uncertainty_js_continuous(means, sigma);
  }
  return rep;
}

std::vector<UncertaintyReport> evaluate_uncertainty_batch(const SubmodelBundle& bundle,
                                                          const UncertaintyOptions& opt) {
  std::vector<UncertaintyReport> out;
  out.reserve(bundle.batch());
  for (int row = 0; row < bundle.batch(); ++row)
    out.push_back(evaluate_uncertainty(bundle, row, opt));
  return out;
}

}  // namespace oodppo
