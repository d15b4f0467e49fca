//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace retro::chem {

enum class Chirality : std::uint8_t {
  kNone,
  kCounterClockwise,  // @
  kClockwise,         // @@
};

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

// Cis/trans marks, stored relative to the bond's begin -> end direction.
enum class BondDir : std::uint8_t {
  kNone,
  kUp,    // '/'
  kDown,  // '\'
};

struct Atom {
  int element = 6;
  int charge = 0;
  bool aromatic = false;
  // Set for bracket atoms and for atoms whose H count was fixed by a rewrite.
  std::optional<int> explicit_h;
  // 0 means unmapped.
  int atom_map = 0;
  Chirality chirality = Chirality::kNone;
  // 0 means natural abundance.
  int isotope = 0;

  bool operator==(const Atom &) const = default;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;
  BondDir dir = BondDir::kNone;

  int other(int atom) const { return atom == begin ? end : begin; }

  bool operator==(const Bond &) const = default;
};

struct Neighbor {
  int atom;
  int bond;
};

/// Simple undirected molecular graph with heavy atoms only; hydrogens are
/// carried as counts on their parent atom.
class MolGraph {
public:
  MolGraph() = default;

  int add_atom(const Atom &atom);

  /// Throws std::invalid_argument on self loops, bad indices or a second
  /// bond between the same pair.
  int add_bond(int a, int b, BondOrder order, BondDir dir = BondDir::kNone);

  void remove_bond(int bond_index);

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  bool empty() const { return atoms_.empty(); }

  const Atom &atom(int i) const { return atoms_[i]; }
  Atom &atom(int i) { return atoms_[i]; }
  std::span<const Atom> atoms() const { return atoms_; }

  const Bond &bond(int i) const { return bonds_[i]; }
  Bond &bond(int i) { return bonds_[i]; }
  std::span<const Bond> bonds() const { return bonds_; }

  std::span<const Neighbor> neighbors(int i) const { return adj_[i]; }
  int degree(int i) const { return static_cast<int>(adj_[i].size()); }

  std::optional<int> bond_between(int a, int b) const;

  /// Hydrogens implied by valence completion, ignoring explicit_h.
  int default_h(int i) const;

  /// Explicit H if set, otherwise completion to the lowest allowed valence
  /// that accommodates the current bonds.
  int total_h(int i) const;

  /// Bond-order sum plus hydrogens, with aromatic bonds counted as one.
  int valence(int i) const;

  /// True if some allowed valence of the atom accommodates its bonds and
  /// hydrogens. Elements without a valence model always pass.
  bool valence_ok(int i) const;

  /// Atom indices per connected component, components ordered by their
  /// smallest atom index.
  std::vector<std::vector<int>> components() const;

  /// Induced subgraph over `atoms` (in the given order). Bonds keep their
  /// orientation relative to the new indices.
  MolGraph subgraph(std::span<const int> atoms) const;

  /// Appends `other` as additional component(s); returns the index offset.
  int append(const MolGraph &other);

  bool operator==(const MolGraph &other) const {
    return atoms_ == other.atoms_ && bonds_ == other.bonds_;
  }

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adj_;
};

/// Copy with all atom-map numbers cleared.
MolGraph strip_atom_maps(const MolGraph &mol);

/// Relabels atoms so that old atom i becomes new atom perm[i]. Bond list
/// order follows the original bond order.
MolGraph permute_atoms(const MolGraph &mol, std::span<const int> perm);

/// Structural sanity checks used after graph rewrites: valences, aromatic
/// atoms carrying at least two aromatic bonds and aromatic bonds between
/// aromatic atoms only.
bool is_sane(const MolGraph &mol);

}  // namespace retro::chem
