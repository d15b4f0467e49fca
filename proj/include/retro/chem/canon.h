//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "retro/chem/molecule.h"

namespace retro::chem {

/// Node- and edge-labelled graph used by the canonical ordering search.
/// Labels are arbitrary integers; only their relative order matters.
struct LabeledGraph {
  std::vector<long long> node_labels;
  // (neighbour, edge label) per node.
  std::vector<std::vector<std::pair<int, int>>> adjacency;
};

/// Iterative neighbourhood refinement of `ranks` in place. A rank is the
/// number of nodes with a strictly smaller class, so tied nodes share the
/// smallest rank of their class.
void refine_ranks(const LabeledGraph &g, std::vector<int> &ranks);

/**
 * Canonical total order of the nodes of `g`.
 *
 * Classes start from the node labels and are refined by neighbourhood
 * invariants. Remaining ties are broken by singling out each member of the
 * smallest tied class in turn and refining again; every complete ordering
 * reached is rendered with `leaf_text` and the lexicographically smallest
 * rendering wins. After `leaf_budget` leaves only the first member of each
 * tied class is tried.
 */
std::vector<int> canonical_order(
    const LabeledGraph &g,
    const std::function<std::string(std::span<const int>)> &leaf_text,
    int leaf_budget = 64);

/// Canonical per-atom ranks (a permutation of 0..n-1). Atom invariants are
/// element, charge, heavy degree, H count, aromaticity, isotope and
/// chirality tag; atom maps participate only when `keep_maps` is set.
std::vector<int> canonical_ranks(const MolGraph &mol, bool keep_maps = false);

/// Canonical SMILES. Components are written separately and joined in
/// lexicographic order. Atom maps are stripped unless `keep_maps`.
std::string canonical_smiles(const MolGraph &mol, bool keep_maps = false);

/// Parses and canonicalizes; throws SyntaxError.
std::string canonical_smiles(std::string_view smiles);

/// Canonical SMILES of each connected component, sorted.
std::vector<std::string> canonical_components(const MolGraph &mol);

/// Joins sorted canonical component strings with '.'.
std::string join_components(std::vector<std::string> parts);

}  // namespace retro::chem
