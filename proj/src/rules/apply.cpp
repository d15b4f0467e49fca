//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/rules/apply.h"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>

#include "retro/chem/canon.h"

namespace retro::rules {
namespace {

using chem::AtomPredicate;
using chem::BondOrder;
using chem::BondPredicate;
using chem::MolGraph;
using chem::Pattern;

BondOrder order_of(BondPredicate pred) {
  switch (pred) {
  case BondPredicate::kSingle:
    return BondOrder::kSingle;
  case BondPredicate::kDouble:
    return BondOrder::kDouble;
  case BondPredicate::kTriple:
    return BondOrder::kTriple;
  case BondPredicate::kAromatic:
    return BondOrder::kAromatic;
  case BondPredicate::kAny:
    break;
  }
  throw RewriteFailure("wildcard bond cannot be instantiated");
}

void remove_bonds(MolGraph &mol, std::vector<int> bonds) {
  std::sort(bonds.rbegin(), bonds.rend());
  for (const int b: bonds)
    mol.remove_bond(b);
}

void apply_predicate(chem::Atom &atom, const AtomPredicate &p) {
  if (p.charge)
    atom.charge = *p.charge;
  if (p.aromatic)
    atom.aromatic = *p.aromatic;
  if (p.h_count)
    atom.explicit_h = *p.h_count;
}

/**
 * Shared surgery: `from` is the matched side, `to` the side to build.
 * Bonds of `from` between matched atoms are removed, bonds of `to` are
 * added between the corresponding atoms, and unlabelled `to` nodes become
 * new atoms. Returns the atom index of every `to` node.
 */
std::vector<int> swap_core(MolGraph &mol, const Pattern &from, const Pattern &to,
                           const chem::Embedding &embedding) {
  std::unordered_map<int, int> atom_of_label;
  for (int i = 0; i < from.num_nodes(); ++i) {
    if (from.node(i).label != 0)
      atom_of_label[from.node(i).label] = embedding[i];
  }

  std::vector<int> doomed;
  for (const auto &e: from.edges()) {
    const auto b = mol.bond_between(embedding[e.a], embedding[e.b]);
    if (!b)
      throw RewriteFailure("embedding does not cover a core bond");
    doomed.push_back(*b);
  }
  remove_bonds(mol, std::move(doomed));

  std::vector<int> atom_of(to.num_nodes(), -1);
  for (int i = 0; i < to.num_nodes(); ++i) {
    const AtomPredicate &p = to.node(i);
    if (p.label != 0) {
      auto it = atom_of_label.find(p.label);
      if (it == atom_of_label.end())
        throw RewriteFailure("label without a matched atom");
      atom_of[i] = it->second;
    } else {
      if (!p.element)
        throw RewriteFailure("new atom without element");
      chem::Atom atom;
      atom.element = *p.element;
      atom.aromatic = p.aromatic.value_or(false);
      atom.charge = p.charge.value_or(0);
      atom.explicit_h = p.h_count;
      atom_of[i] = mol.add_atom(atom);
    }
  }
  for (const auto &e: to.edges()) {
    if (mol.bond_between(atom_of[e.a], atom_of[e.b]))
      throw RewriteFailure("rewrite would duplicate a bond");
    mol.add_bond(atom_of[e.a], atom_of[e.b], order_of(e.order));
  }
  for (int i = 0; i < to.num_nodes(); ++i) {
    if (to.node(i).label != 0)
      apply_predicate(mol.atom(atom_of[i]), to.node(i));
  }
  return atom_of;
}

template<class Rewrite>
std::vector<std::string> distinct_results(const Pattern &core, const MolGraph &mol,
                                          Rewrite rewrite) {
  std::set<std::string> out;
  for (const auto &emb: chem::match_pattern(core, mol)) {
    try {
      out.insert(rewrite(emb));
    } catch (const RewriteFailure &) {
      // Impossible surgery at this site; other embeddings may still work.
    } catch (const std::invalid_argument &) {
    }
  }
  return { out.begin(), out.end() };
}

}  // namespace

MolGraph rewrite_retro(const RetroTemplate &t, const MolGraph &target,
                       const chem::Embedding &embedding) {
  MolGraph mol = chem::strip_atom_maps(target);
  swap_core(mol, t.product_core, t.reactant_core, embedding);
  if (!chem::is_sane(mol))
    throw RewriteFailure("rewritten graph violates valence or aromaticity");
  return mol;
}

MolGraph rewrite_forward(const RetroTemplate &t, const MolGraph &reactants,
                         const chem::Embedding &embedding) {
  MolGraph mol = chem::strip_atom_maps(reactants);
  swap_core(mol, t.reactant_core, t.product_core, embedding);

  std::vector<char> deleted(mol.num_atoms(), 0);
  std::vector<int> seeds;
  for (int i = 0; i < t.reactant_core.num_nodes(); ++i) {
    if (t.reactant_core.node(i).label == 0)
      deleted[embedding[i]] = 1;
    else
      seeds.push_back(embedding[i]);
  }
  std::vector<char> keep(mol.num_atoms(), 0);
  std::vector<int> stack = seeds;
  for (const int s: seeds)
    keep[s] = 1;
  while (!stack.empty()) {
    const int a = stack.back();
    stack.pop_back();
    for (const auto &nb: mol.neighbors(a)) {
      if (!keep[nb.atom] && !deleted[nb.atom]) {
        keep[nb.atom] = 1;
        stack.push_back(nb.atom);
      }
    }
  }
  std::vector<int> kept;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    if (keep[i])
      kept.push_back(i);
  }
  MolGraph product = mol.subgraph(kept);
  if (!chem::is_sane(product))
    throw RewriteFailure("forward product violates valence or aromaticity");
  return product;
}

std::vector<std::string> apply_retro(const RetroTemplate &t, const MolGraph &target) {
  return distinct_results(t.product_core, target, [&](const chem::Embedding &emb) {
    return chem::join_components(chem::canonical_components(rewrite_retro(t, target, emb)));
  });
}

std::vector<std::string> apply_forward(const RetroTemplate &t, const MolGraph &reactants) {
  return distinct_results(t.reactant_core, reactants, [&](const chem::Embedding &emb) {
    return chem::join_components(chem::canonical_components(rewrite_forward(t, reactants, emb)));
  });
}

}  // namespace retro::rules
