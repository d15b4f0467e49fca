//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "retro/chem/molecule.h"

namespace retro::chem {

/// Constraints on one matched atom. Unset fields are wildcards.
struct AtomPredicate {
  std::optional<int> element;
  std::optional<bool> aromatic;
  std::optional<int> charge;
  // Minimum heavy-atom degree.
  std::optional<int> min_degree;
  // Exact total hydrogen count.
  std::optional<int> h_count;
  // Correspondence label (0 = none); not a matching constraint.
  int label = 0;

  bool matches(const MolGraph &mol, int atom) const;

  bool operator==(const AtomPredicate &) const = default;
};

enum class BondPredicate : std::uint8_t {
  kSingle,
  kDouble,
  kTriple,
  kAromatic,
  kAny,
};

bool bond_matches(BondPredicate pred, BondOrder order);

struct PatternEdge {
  int a;
  int b;
  BondPredicate order;

  bool operator==(const PatternEdge &) const = default;
};

class Pattern {
public:
  int add_node(const AtomPredicate &pred);
  int add_edge(int a, int b, BondPredicate order);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const AtomPredicate &node(int i) const { return nodes_[i]; }
  AtomPredicate &node(int i) { return nodes_[i]; }
  std::span<const AtomPredicate> nodes() const { return nodes_; }
  const PatternEdge &edge(int i) const { return edges_[i]; }
  std::span<const PatternEdge> edges() const { return edges_; }
  std::span<const Neighbor> neighbors(int i) const { return adj_[i]; }
  std::optional<int> edge_between(int a, int b) const;

  /// Node indices per connected component.
  std::vector<std::vector<int>> components() const;

  bool operator==(const Pattern &other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

private:
  std::vector<AtomPredicate> nodes_;
  std::vector<PatternEdge> edges_;
  std::vector<std::vector<Neighbor>> adj_;
};

/// Pattern node index -> molecule atom index.
using Embedding = std::vector<int>;

/**
 * All injective maps from pattern nodes to molecule atoms that satisfy
 * every node predicate and map every pattern edge onto a molecule bond
 * satisfying its bond predicate. Automorphic duplicates are kept. The
 * result is sorted lexicographically. Stereo marks are ignored.
 */
std::vector<Embedding> match_pattern(const Pattern &pattern, const MolGraph &mol);

/**
 * Text form. Every node is bracketed and carries ';'-separated primitives
 * followed by an optional ":label":
 *
 *   C / c      element with aliphatic / aromatic flag
 *   #6         element, aromaticity unconstrained
 *   *          any element
 *   A / a      aliphatic / aromatic flag alone
 *   +0 -1 +2   formal charge
 *   D3         minimum heavy degree
 *   H1         exact hydrogen count
 *
 * Bonds are always written: '-' single, '=' double, '#' triple,
 * ':' aromatic, '~' any. Branches, ring closures and '.' follow SMILES.
 * Example: "[C;+0;D3;H0:1](=[O;+0;D1;H0])-[O;+0;D2;H0:2]".
 */
std::string write_pattern(const Pattern &pattern, std::span<const int> ranks);
std::string write_pattern(const Pattern &pattern);

/// Throws SyntaxError.
Pattern parse_pattern(std::string_view text);

/// Node predicate describing `atom` exactly as recorded at extraction time.
AtomPredicate describe_atom(const MolGraph &mol, int atom);

}  // namespace retro::chem
