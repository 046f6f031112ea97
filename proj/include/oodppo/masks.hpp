// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace oodppo {

// A fixed set of k binary channel masks with tunable overlap. scale = 1
// collapses all masks to all-ones (identical submodels); scale = k with
// width divisible by k yields pairwise-disjoint masks.
struct MaskSet {
  int k = 0;
  int width = 0;
  double scale = 1.0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::uint8_t>> masks;  // k rows of length width, entries 0/1

  int ones_per_mask() const;  // exact count shared by every mask
  int overlap(int i, int j) const;
};

// Number of active channels per mask: m = round(width*k / (k + scale*(k-1))).
int mask_ones_count(int k, int width, double scale);

// Deterministic generator: channels are assigned to masks greedily, keeping
// per-mask ones-counts exact and the spread of pairwise overlaps minimal,
// then channel positions are shuffled by a seed-derived permutation.
MaskSet generate_masks(int k, int width, double scale, std::uint64_t seed);

}  // namespace oodppo
