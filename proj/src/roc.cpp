// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/roc.hpp"

#include <algorithm>
#include <numeric>

#include "oodppo/errors.hpp"

namespace oodppo {

double mann_whitney_auc(const std::vector<double>& id_scores,
                        const std::vector<double>& ood_scores) {
  const std::size_t n0 = id_scores.size(), n1 = ood_scores.size();
  if (n0 == 0 || n1 == 0) throw ConfigError("mann_whitney_auc: both classes must be non-empty");
  struct Entry {
    double score;
    bool ood;
  };
  std::vector<Entry> all;
  all.reserve(n0 + n1);
  for (double s : id_scores) all.push_back({s, false});
  for (double s : ood_scores) all.push_back({s, true});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.score < b.score; });

  // Average ranks over tie groups; 1-based ranks.
  double rank_sum_ood = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1 .. j
    for (std::size_t t = i; t < j; ++t)
      if (all[t].ood) rank_sum_ood += avg_rank;
    i = j;
  }
  const double u = rank_sum_ood - 0.5 * static_cast<double>(n1) * (n1 + 1);
  return u / (static_cast<double>(n0) * static_cast<double>(n1));
}

RocResult roc_curve(const std::string& measure, const std::vector<double>& id_scores,
                    const std::vector<double>& ood_scores) {
  const std::size_t n0 = id_scores.size(), n1 = ood_scores.size();
  if (n0 == 0 || n1 == 0) throw ConfigError("roc_curve: both classes must be non-empty");

  std::vector<double> all;
  all.reserve(n0 + n1);
  all.insert(all.end(), id_scores.begin(), id_scores.end());
  all.insert(all.end(), ood_scores.begin(), ood_scores.end());
  std::sort(all.begin(), all.end(), std::greater<double>());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<double> id_sorted = id_scores, ood_sorted = ood_scores;
  std::sort(id_sorted.begin(), id_sorted.end(), std::greater<double>());
  std::sort(ood_sorted.begin(), ood_sorted.end(), std::greater<double>());

  RocResult r;
  r.measure = measure;
  r.n_id = static_cast<int>(n0);
  r.n_ood = static_cast<int>(n1);
  r.points.emplace_back(0.0, 0.0);
  std::size_t ci = 0, co = 0;
  for (double th : all) {
    while (ci < id_sorted.size() && id_sorted[ci] >= th) ++ci;
    while (co < ood_sorted.size() && ood_sorted[co] >= th) ++co;
    r.thresholds.push_back(th);
    r.points.emplace_back(static_cast<double>(ci) / n0, static_cast<double>(co) / n1);
  }
  r.auc = mann_whitney_auc(id_scores, ood_scores);
  r.flipped = r.auc < 0.5;
  return r;
}

double trapezoid_auc(const RocResult& roc) {
  double area = 0.0;
  for (std::size_t i = 1; i < roc.points.size(); ++i) {
    const auto& [x0, y0] = roc.points[i - 1];
    const auto& [x1, y1] = roc.points[i];
    area += (x1 - x0) * 0.5 * (y0 + y1);
  }
  return area;
}

}  // namespace oodppo
