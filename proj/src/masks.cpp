// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/masks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oodppo/errors.hpp"
#include "oodppo/rng.hpp"

namespace oodppo {

int MaskSet::ones_per_mask() const {
  return mask_ones_count(k, width, scale);
}

int MaskSet::overlap(int i, int j) const {
  int n = 0;
  for (int c = 0; c < width; ++c) n += masks[i][c] & masks[j][c];
  return n;
}

int mask_ones_count(int k, int width, double scale) {
  // Full-overlap extreme: identical all-ones masks, so masked submodels
  // collapse to the unmasked network exactly.
  if (scale == 1.0) return width;
  const double m = static_cast<double>(width) * k / (k + scale * (k - 1));
  int ones = static_cast<int>(std::llround(m));
  if (ones > width) ones = width;
  return ones;
}

namespace {

// Enumerate all size-u subsets of {0..k-1} as bitmasks, in lexicographic
// order of their member lists (so ties resolve to lowest indices).
void enumerate_subsets(int k, int u, int start, std::uint32_t acc,
                       std::vector<std::uint32_t>& out) {
  if (u == 0) {
    out.push_back(acc);
    return;
  }
  for (int i = start; i <= k - u; ++i)
    enumerate_subsets(k, u - 1, i + 1, acc | (1u << i), out);
}

}  // namespace

MaskSet generate_masks(int k, int width, double scale, std::uint64_t seed) {
  if (k < 2) throw ConfigError("generate_masks: k must be >= 2");
  if (k > 16) throw ConfigError("generate_masks: k > 16 is not supported");
  if (width < k) throw ConfigError("generate_masks: width must be >= k");
  if (scale < 1.0 || scale > static_cast<double>(k))
    throw ConfigError("generate_masks: scale must lie in [1, k]");

  const int m = mask_ones_count(k, width, scale);
  if (m < 1) throw ConfigError("generate_masks: configuration yields empty masks");

  // Per-channel usage counts: total slots k*m spread over `width` channels,
  // balanced within one.
  const int total = k * m;
  const int base = total / width;
  const int extra = total % width;  // this many channels get base+1 slots
  if (base > k)
    throw ConfigError("generate_masks: width too small for requested overlap");

  std::vector<int> need(k, m);
  std::vector<std::vector<int>> ov(k, std::vector<int>(k, 0));
  std::vector<std::vector<std::uint8_t>> raw(k, std::vector<std::uint8_t>(width, 0));

  std::vector<std::vector<std::uint32_t>> subsets_by_size(k + 1);
  for (int u = 1; u <= k; ++u) enumerate_subsets(k, u, 0, 0u, subsets_by_size[u]);

  std::vector<std::uint32_t> channel_set(width, 0);
  for (int c = 0; c < width; ++c) {
    const int u = base + (c < extra ? 1 : 0);
    if (u == 0) continue;
    // Rank candidate subsets: most remaining need first (keeps per-mask
    // counts exact), then least accumulated overlap among the chosen pairs,
    // then smallest resulting max overlap, then lexicographic.
    long best_need = -1;
    int best_sum = 0, best_max = 0;
    std::uint32_t best_set = 0;
    bool found = false;
    for (std::uint32_t s : subsets_by_size[u]) {
      long sum_need = 0;
      bool feasible = true;
      for (int i = 0; i < k && feasible; ++i) {
        if (!(s & (1u << i))) continue;
        if (need[i] <= 0) feasible = false;
        sum_need += need[i];
      }
      if (!feasible) continue;
      int pair_sum = 0, pair_max = 0;
      for (int i = 0; i < k; ++i) {
        if (!(s & (1u << i))) continue;
        for (int j = i + 1; j < k; ++j) {
          if (!(s & (1u << j))) continue;
          pair_sum += ov[i][j];
          pair_max = std::max(pair_max, ov[i][j] + 1);
        }
      }
      if (!found || sum_need > best_need ||
          (sum_need == best_need &&
           (pair_sum < best_sum || (pair_sum == best_sum && pair_max < best_max)))) {
        found = true;
        best_need = sum_need;
        best_sum = pair_sum;
        best_max = pair_max;
        best_set = s;
      }
    }
    if (!found) throw ConfigError("generate_masks: infeasible mask configuration");
    channel_set[c] = best_set;
    for (int i = 0; i < k; ++i) {
      if (!(best_set & (1u << i))) continue;
      raw[i][c] = 1;
      --need[i];
      for (int j = i + 1; j < k; ++j)
        if (best_set & (1u << j)) {
          ++ov[i][j];
          ++ov[j][i];
        }
    }
  }
  for (int i = 0; i < k; ++i)
    if (need[i] != 0) throw ConfigError("generate_masks: greedy assignment failed");

  // Rebalance pass: steepest-descent membership swaps that level the
  // pairwise-overlap profile (sum of squared overlaps) without touching
  // per-mask ones-counts. Deterministic; terminates when no swap improves.
  const int max_rounds = 20 * k * width;
  for (int round = 0; round < max_rounds; ++round) {
    long best_delta = 0;
    int best_c1 = -1, best_c2 = -1, best_a = -1, best_b = -1;
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        if (a == b) continue;
        for (int c1 = 0; c1 < width; ++c1) {
          const std::uint32_t s1 = channel_set[c1];
          if (!(s1 & (1u << a)) || (s1 & (1u << b))) continue;
          for (int c2 = 0; c2 < width; ++c2) {
            const std::uint32_t s2 = channel_set[c2];
            if (!(s2 & (1u << b)) || (s2 & (1u << a))) continue;
            // Move a: c1 -> c2, and b: c2 -> c1. Delta of sum(ov^2).
            long delta = 0;
            for (int m = 0; m < k; ++m) {
              if (m == a || m == b) continue;
              const bool in1 = (s1 & (1u << m)) != 0;
              const bool in2 = (s2 & (1u << m)) != 0;
              if (in1 && in2) continue;  // the +1/-1 cancel for this mask
              if (in1) {
                delta += -2 * ov[std::min(a, m)][std::max(a, m)] + 1;  // a loses pair
                delta += 2 * ov[std::min(b, m)][std::max(b, m)] + 1;   // b gains pair
              } else if (in2) {
                delta += -2 * ov[std::min(b, m)][std::max(b, m)] + 1;
                delta += 2 * ov[std::min(a, m)][std::max(a, m)] + 1;
              }
            }
            if (delta < best_delta) {
              best_delta = delta;
              best_c1 = c1;
              best_c2 = c2;
              best_a = a;
              best_b = b;
            }
          }
        }
      }
    }
    if (best_c1 < 0) break;
    const std::uint32_t s1 = channel_set[best_c1];
    const std::uint32_t s2 = channel_set[best_c2];
    for (int m = 0; m < k; ++m) {
      if (m == best_a || m == best_b) continue;
      if (s1 & (1u << m)) {
        --ov[std::min(best_a, m)][std::max(best_a, m)];
        --ov[std::max(best_a, m)][std::min(best_a, m)];
        ++ov[std::min(best_b, m)][std::max(best_b, m)];
        ++ov[std::max(best_b, m)][std::min(best_b, m)];
      }
      if (s2 & (1u << m)) {
        --ov[std::min(best_b, m)][std::max(best_b, m)];
        --ov[std::max(best_b, m)][std::min(best_b, m)];
        ++ov[std::min(best_a, m)][std::max(best_a, m)];
        ++ov[std::max(best_a, m)][std::min(best_a, m)];
      }
    }
    channel_set[best_c1] = (s1 & ~(1u << best_a)) | (1u << best_b);
    channel_set[best_c2] = (s2 & ~(1u << best_b)) | (1u << best_a);
    raw[best_a][best_c1] = 0;
    raw[best_b][best_c1] = 1;
    raw[best_b][best_c2] = 0;
    raw[best_a][best_c2] = 1;
  }

  // Seed-derived channel permutation; ones-counts and overlaps are invariant.
  Rng rng = Rng(seed).derive(0x6d61736bULL);
  std::vector<int> perm(width);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = width - 1; i > 0; --i) {
    const int j = rng.uniform_int(i + 1);
    std::swap(perm[i], perm[j]);
  }

  MaskSet set;
  set.k = k;
  set.width = width;
  set.scale = scale;
  set.seed = seed;
  set.masks.assign(k, std::vector<std::uint8_t>(width, 0));
  for (int i = 0; i < k; ++i)
    for (int c = 0; c < width; ++c) set.masks[i][perm[c]] = raw[i][c];
  return set;
}

}  // namespace oodppo
