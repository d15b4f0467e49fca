//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/chem/molecule.h"

#include <algorithm>
#include <numeric>

#include "retro/chem/element.h"

namespace retro::chem {
namespace {

struct BondSums {
  int plain = 0;
  int aromatic = 0;
};

BondSums bond_sums(const MolGraph &mol, int i) {
  BondSums s;
  for (const Neighbor &nb: mol.neighbors(i)) {
    const BondOrder order = mol.bond(nb.bond).order;
    if (order == BondOrder::kAromatic)
      ++s.aromatic;
    else
      s.plain += static_cast<int>(order);
  }
  return s;
}

}  // namespace

int MolGraph::add_atom(const Atom &atom) {
  atoms_.push_back(atom);
  adj_.emplace_back();
  return num_atoms() - 1;
}

int MolGraph::add_bond(int a, int b, BondOrder order, BondDir dir) {
  if (a == b)
    throw std::invalid_argument("self-loop bond");
  if (a < 0 || b < 0 || a >= num_atoms() || b >= num_atoms())
    throw std::invalid_argument("bond endpoint out of range");
  if (bond_between(a, b))
    throw std::invalid_argument("duplicate bond");

  bonds_.push_back({ a, b, order, dir });
  const int idx = num_bonds() - 1;
  adj_[a].push_back({ b, idx });
  adj_[b].push_back({ a, idx });
  return idx;
}

void MolGraph::remove_bond(int bond_index) {
  bonds_.erase(bonds_.begin() + bond_index);
  for (auto &nbs: adj_)
    nbs.clear();
  for (int i = 0; i < num_bonds(); ++i) {
    adj_[bonds_[i].begin].push_back({ bonds_[i].end, i });
    adj_[bonds_[i].end].push_back({ bonds_[i].begin, i });
  }
}

std::optional<int> MolGraph::bond_between(int a, int b) const {
  for (const Neighbor &nb: adj_[a]) {
    if (nb.atom == b)
      return nb.bond;
  }
  return std::nullopt;
}

int MolGraph::total_h(int i) const {
  const Atom &a = atoms_[i];
  if (a.explicit_h)
    return *a.explicit_h;
  return default_h(i);
}

int MolGraph::default_h(int i) const {
  const Atom &a = atoms_[i];

  const auto valences = allowed_valences(a.element, a.charge);
  if (valences.empty())
    return 0;

  const BondSums s = bond_sums(*this, i);
  if (a.aromatic) {
    // One extra electron pair is used by the pi system when it fits.
    const int v = valences.front();
    int used = s.plain + s.aromatic;
    if (used + 1 <= v)
      ++used;
    return std::max(0, v - used);
  }

  const int used = s.plain + s.aromatic;
  for (const int v: valences) {
    if (v >= used)
      return v - used;
  }
  return 0;
}

int MolGraph::valence(int i) const {
  const BondSums s = bond_sums(*this, i);
  return s.plain + s.aromatic + total_h(i);
}

bool MolGraph::valence_ok(int i) const {
  const Atom &a = atoms_[i];
  const auto valences = allowed_valences(a.element, a.charge);
  if (valences.empty())
    return true;
  return valence(i) <= valences.back();
}

std::vector<std::vector<int>> MolGraph::components() const {
  std::vector<int> comp(num_atoms(), -1);
  std::vector<std::vector<int>> result;
  std::vector<int> stack;
  for (int s = 0; s < num_atoms(); ++s) {
    if (comp[s] >= 0)
      continue;
    const int c = static_cast<int>(result.size());
    result.emplace_back();
    comp[s] = c;
    stack.push_back(s);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      result[c].push_back(u);
      for (const Neighbor &nb: adj_[u]) {
        if (comp[nb.atom] < 0) {
          comp[nb.atom] = c;
          stack.push_back(nb.atom);
        }
      }
    }
    std::sort(result[c].begin(), result[c].end());
  }
  return result;
}

MolGraph MolGraph::subgraph(std::span<const int> atoms) const {
  std::vector<int> remap(num_atoms(), -1);
  MolGraph sub;
  for (const int a: atoms)
    remap[a] = sub.add_atom(atoms_[a]);
  for (const Bond &b: bonds_) {
    if (remap[b.begin] >= 0 && remap[b.end] >= 0)
      sub.add_bond(remap[b.begin], remap[b.end], b.order, b.dir);
  }
  return sub;
}

int MolGraph::append(const MolGraph &other) {
  const int offset = num_atoms();
  for (const Atom &a: other.atoms())
    add_atom(a);
  for (const Bond &b: other.bonds())
    add_bond(b.begin + offset, b.end + offset, b.order, b.dir);
  return offset;
}

MolGraph strip_atom_maps(const MolGraph &mol) {
  MolGraph copy = mol;
  for (int i = 0; i < copy.num_atoms(); ++i)
    copy.atom(i).atom_map = 0;
  return copy;
}

MolGraph permute_atoms(const MolGraph &mol, std::span<const int> perm) {
  std::vector<int> inverse(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    inverse[perm[i]] = static_cast<int>(i);

  MolGraph out;
  for (const int old: inverse)
    out.add_atom(mol.atom(old));
  for (const Bond &b: mol.bonds())
    out.add_bond(perm[b.begin], perm[b.end], b.order, b.dir);
  return out;
}

bool is_sane(const MolGraph &mol) {
  for (int i = 0; i < mol.num_atoms(); ++i) {
    if (!mol.valence_ok(i))
      return false;
    if (mol.total_h(i) < 0)
      return false;
    const Atom &a = mol.atom(i);
    int aromatic_bonds = 0;
    for (const Neighbor &nb: mol.neighbors(i)) {
      if (mol.bond(nb.bond).order != BondOrder::kAromatic)
        continue;
      if (!a.aromatic || !mol.atom(nb.atom).aromatic)
        return false;
      ++aromatic_bonds;
    }
    if (a.aromatic && aromatic_bonds < 2)
      return false;
  }
  return true;
}

}  // namespace retro::chem
