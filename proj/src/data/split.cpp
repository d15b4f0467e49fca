//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/data/split.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace retro::data {

void SplitSpec::validate() const {
  double sum = 0;
  for (const double r: ratios) {
    if (!(r > 0))
      throw std::invalid_argument("split ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("split ratios must sum to 1");
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3> &ratios) {
  std::array<std::size_t, 3> sizes {};
  std::array<double, 3> frac {};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const double exact = static_cast<double>(n) * ratios[k];
    // Guard against 0.8 * 50000 = 39999.999...
    const double fl = std::floor(exact + 1e-9);
    sizes[k] = static_cast<std::size_t>(fl);
    frac[k] = exact - fl;
    assigned += sizes[k];
  }
  std::array<int, 3> order { 0, 1, 2 };
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frac[a] > frac[b]; });
  for (int k = 0; assigned < n; ++k, ++assigned)
    ++sizes[order[k % 3]];
  return sizes;
}

SplitIndices split_dataset(std::size_t n, const SplitSpec &spec,
                           const std::vector<int> &classes) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  std::vector<std::vector<std::size_t>> groups;
  if (spec.stratify) {
    if (classes.size() != n)
      throw std::invalid_argument("stratified split needs one class per item");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < n; ++i)
      by_class[classes[i]].push_back(i);
    for (auto &[k, idx]: by_class)
      groups.push_back(std::move(idx));
  } else {
    groups.emplace_back(n);
    std::iota(groups[0].begin(), groups[0].end(), std::size_t { 0 });
  }

  SplitIndices out;
  for (auto &idx: groups) {
    // Fisher-Yates with an explicit draw so results do not depend on the
    // standard library's shuffle implementation.
    for (std::size_t i = idx.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(idx[i - 1], idx[j]);
    }
    const auto sizes = split_sizes(idx.size(), spec.ratios);
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + sizes[0]);
    out.valid.insert(out.valid.end(), idx.begin() + sizes[0], idx.begin() + sizes[0] + sizes[1]);
    out.test.insert(out.test.end(), idx.begin() + sizes[0] + sizes[1], idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.valid.begin(), out.valid.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace retro::data
