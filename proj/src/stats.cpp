// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/stats.hpp"

#include <algorithm>
#include <cmath>

#include "oodppo/errors.hpp"

namespace oodppo {

void RunningStats::update(const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != dim())
    throw ConfigError("RunningStats::update: dimension mismatch");
  ++count;
  for (int j = 0; j < dim(); ++j) {
    const double delta = x[j] - mean[j];
    mean[j] += delta / static_cast<double>(count);
    m2[j] += delta * (x[j] - mean[j]);
    if (count == 1) {
      vmin[j] = x[j];
      vmax[j] = x[j];
    } else {
      vmin[j] = std::min(vmin[j], x[j]);
      vmax[j] = std::max(vmax[j], x[j]);
    }
  }
}

std::vector<double> RunningStats::std() const {
  std::vector<double> out(mean.size(), 0.0);
  if (count > 0)
    for (int j = 0; j < dim(); ++j) out[j] = std::sqrt(m2[j] / static_cast<double>(count));
  return out;
}

std::vector<double> RunningStats::normalize(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != dim())
    throw ConfigError("RunningStats::normalize: dimension mismatch");
  if (count == 0) return x;
  std::vector<double> out(x.size());
  for (int j = 0; j < dim(); ++j) {
    const double sd = std::sqrt(m2[j] / static_cast<double>(count));
    out[j] = (x[j] - mean[j]) / std::max(sd, 1e-8);
  }
  return out;
}

}  // namespace oodppo
