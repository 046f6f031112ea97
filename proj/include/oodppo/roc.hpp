// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace oodppo {

// ROC curve and AUC for one uncertainty measure, scoring OOD-vs-ID as a
// binary classifier (higher score = predict OOD).
struct RocResult {
  std::string measure;
  std::vector<double> thresholds;                 // descending distinct scores
  std::vector<std::pair<double, double>> points;  // (FPR, TPR); starts (0,0), ends (1,1)
  double auc = 0.0;                               // Mann-Whitney identity
  bool flipped = false;                           // auc < 0.5 (labels look inverted)
  int n_id = 0;
  int n_ood = 0;
};

// AUC = [#(ood > id) + 0.5 #(ood == id)] / (n_ood * n_id), computed via
// average ranks in O(n log n).
double mann_whitney_auc(const std::vector<double>& id_scores,
                        const std::vector<double>& ood_scores);

// Threshold sweep over all distinct score values.
RocResult roc_curve(const std::string& measure, const std::vector<double>& id_scores,
                    const std::vector<double>& ood_scores);

// Trapezoidal area under the curve points; equals the Mann-Whitney AUC.
double trapezoid_auc(const RocResult& roc);

}  // namespace oodppo
