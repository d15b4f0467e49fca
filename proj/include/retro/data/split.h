//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace retro::data {

struct SplitSpec {
  std::array<double, 3> ratios { 0.8, 0.1, 0.1 };
  std::uint64_t seed = 0;
  // Apply the ratios within each class separately.
  bool stratify = false;

  /// Throws std::invalid_argument unless ratios are positive and sum to 1.
  void validate() const;
};

/// Sizes for n items by largest-remainder rounding; each within 1 of
/// n * ratio.
std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3> &ratios);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};

/// Deterministic shuffled partition of 0..n-1. `classes` is only read when
/// stratifying. Each part is returned in ascending index order.
SplitIndices split_dataset(std::size_t n, const SplitSpec &spec,
                           const std::vector<int> &classes = {});

}  // namespace retro::data
