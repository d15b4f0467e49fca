//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Slow reference implementations used only to check the library.

#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "retro/chem/molecule.h"
#include "retro/chem/pattern.h"

namespace retro::testing {

inline bool same_atom(const chem::MolGraph &a, int i, const chem::MolGraph &b, int j) {
  const chem::Atom &x = a.atom(i);
  const chem::Atom &y = b.atom(j);
  return x.element == y.element && x.charge == y.charge && x.aromatic == y.aromatic
         && x.atom_map == y.atom_map && x.isotope == y.isotope
         && x.chirality == y.chirality && a.total_h(i) == b.total_h(j)
         && a.degree(i) == b.degree(j);
}

/// Backtracking attribute-preserving isomorphism test.
inline bool isomorphic(const chem::MolGraph &a, const chem::MolGraph &b) {
  const int n = a.num_atoms();
  if (n != b.num_atoms() || a.num_bonds() != b.num_bonds())
    return false;
  std::vector<int> map(n, -1);
  std::vector<char> used(n, 0);
  std::function<bool(int)> extend = [&](int i) -> bool {
    if (i == n)
      return true;
    for (int j = 0; j < n; ++j) {
      if (used[j] || !same_atom(a, i, b, j))
        continue;
      bool ok = true;
      for (const chem::Neighbor &nb: a.neighbors(i)) {
        if (nb.atom >= i)
          continue;
        auto bond = b.bond_between(j, map[nb.atom]);
        if (!bond || b.bond(*bond).order != a.bond(nb.bond).order) {
          ok = false;
          break;
        }
      }
      if (!ok)
        continue;
      map[i] = j;
      used[j] = 1;
      if (extend(i + 1))
        return true;
      used[j] = 0;
      map[i] = -1;
    }
    return false;
  };
  return extend(0);
}

/// All injective node maps, checked exhaustively without pruning.
inline std::vector<chem::Embedding> brute_force_embeddings(const chem::Pattern &p,
                                                           const chem::MolGraph &mol) {
  std::vector<chem::Embedding> out;
  const int k = p.num_nodes();
  const int n = mol.num_atoms();
  if (k == 0 || k > n)
    return out;
  chem::Embedding current(k, -1);
  std::vector<char> used(n, 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == k) {
      for (int node = 0; node < k; ++node) {
        if (!p.node(node).matches(mol, current[node]))
          return;
      }
      for (const chem::PatternEdge &e: p.edges()) {
        auto bond = mol.bond_between(current[e.a], current[e.b]);
        if (!bond || !chem::bond_matches(e.order, mol.bond(*bond).order))
          return;
      }
      out.push_back(current);
      return;
    }
    for (int atom = 0; atom < n; ++atom) {
      if (used[atom])
        continue;
      used[atom] = 1;
      current[i] = atom;
      rec(i + 1);
      used[atom] = 0;
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

/// Every permutation of the atoms preserving attributes and bonds.
inline std::vector<std::vector<int>> automorphisms(const chem::MolGraph &mol) {
  const int n = mol.num_atoms();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      ok = same_atom(mol, i, mol, perm[i]);
    for (const chem::Bond &b: mol.bonds()) {
      if (!ok)
        break;
      auto other = mol.bond_between(perm[b.begin], perm[b.end]);
      ok = other && mol.bond(*other).order == b.order;
    }
    if (ok)
      out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace retro::testing
