//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Shared skeleton for SMILES and the pattern text form: branch and
// ring-closure bookkeeping on read, depth-first layout on write.

#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "retro/chem/molecule.h"

namespace retro::chem::internal {

struct LineReader {
  // Parses one atom at text[pos], advances pos and returns the node index.
  std::function<int(std::string_view text, std::size_t &pos)> atom;
  std::function<bool(char)> is_bond_symbol;
  // symbol is '\0' when no bond symbol was written.
  std::function<void(int from, int to, char symbol, std::size_t pos)> edge;
};

/// Throws SyntaxError on structural errors (unbalanced parentheses,
/// dangling bonds, unclosed rings).
void read_line(std::string_view text, const LineReader &reader);

using Adjacency = std::vector<std::vector<Neighbor>>;

struct LineWriter {
  std::function<void(std::string &out, int node)> atom;
  std::function<void(std::string &out, int edge, int from, int to)> bond;
};

/// One string per connected component, ordered by lowest rank.
std::vector<std::string> write_components(const Adjacency &adj,
                                          std::span<const int> ranks,
                                          const LineWriter &writer);

char flip_direction(char symbol);

}  // namespace retro::chem::internal
