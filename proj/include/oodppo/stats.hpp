// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace oodppo {

// Per-dimension running statistics (Welford) plus range tracking. Updated
// only during training; frozen at evaluation time.
struct RunningStats {
  long long count = 0;
  std::vector<double> mean;
  std::vector<double> m2;
  std::vector<double> vmin;
  std::vector<double> vmax;

  explicit RunningStats(int dim = 0)
      : mean(dim, 0.0), m2(dim, 0.0), vmin(dim, 0.0), vmax(dim, 0.0) {}

  int dim() const { return static_cast<int>(mean.size()); }
  void update(const std::vector<double>& x);
  std::vector<double> std() const;  // population; zeros while count == 0

  // (x - mean) / max(std, 1e-8); identity while count == 0.
  std::vector<double> normalize(const std::vector<double>& x) const;
};

}  // namespace oodppo
