//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/rules/template.h"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "retro/chem/canon.h"
#include "retro/rules/apply.h"

namespace retro::rules {
namespace {

using chem::AtomPredicate;
using chem::BondOrder;
using chem::BondPredicate;
using chem::MolGraph;
using chem::Pattern;

/// Reactants concatenated into one graph plus map-id lookups on both sides.
struct MappedReaction {
  MolGraph reactants;
  const MolGraph *product = nullptr;
  std::unordered_map<int, int> reactant_atom;  // map id -> reactant index
  std::unordered_map<int, int> product_atom;   // map id -> product index

  // Map id of a reactant atom if it also occurs in the product, else 0.
  int kept_map(int reactant_index) const {
    const int m = reactants.atom(reactant_index).atom_map;
    return m != 0 && product_atom.count(m) ? m : 0;
  }
};

MappedReaction index_maps(const data::ReactionRecord &r) {
  MappedReaction mr;
  for (const auto &m: r.reactants)
    mr.reactants.append(m);
  mr.product = &r.product;

  for (int i = 0; i < r.product.num_atoms(); ++i) {
    const int m = r.product.atom(i).atom_map;
    if (m == 0)
      throw MappingError("product atom " + std::to_string(i) + " is unmapped");
    if (!mr.product_atom.emplace(m, i).second)
      throw MappingError("map id " + std::to_string(m) + " repeated in product");
  }
  for (int i = 0; i < mr.reactants.num_atoms(); ++i) {
    const int m = mr.reactants.atom(i).atom_map;
    if (m != 0 && !mr.reactant_atom.emplace(m, i).second)
      throw MappingError("map id " + std::to_string(m) + " repeated in reactants");
  }
  for (const auto &[m, pi]: mr.product_atom) {
    auto it = mr.reactant_atom.find(m);
    if (it == mr.reactant_atom.end())
      throw MappingError("product map id " + std::to_string(m) + " has no reactant atom");
    if (mr.reactants.atom(it->second).element != r.product.atom(pi).element)
      throw MappingError("map id " + std::to_string(m) + " changes element");
  }
  return mr;
}

BondPredicate predicate_of(BondOrder order) {
  switch (order) {
  case BondOrder::kSingle:
    return BondPredicate::kSingle;
  case BondOrder::kDouble:
    return BondPredicate::kDouble;
  case BondOrder::kTriple:
    return BondPredicate::kTriple;
  case BondOrder::kAromatic:
    return BondPredicate::kAromatic;
  }
  return BondPredicate::kAny;
}

AtomPredicate predicate_of(const MolGraph &mol, int i, bool with_h, int label) {
  AtomPredicate p;
  p.element = mol.atom(i).element;
  p.aromatic = mol.atom(i).aromatic;
  p.charge = mol.atom(i).charge;
  p.min_degree = mol.degree(i);
  if (with_h)
    p.h_count = mol.total_h(i);
  p.label = label;
  return p;
}

long long node_key(const AtomPredicate &p, int side) {
  long long key = side;
  key = key * 256 + (p.element ? *p.element : 255);
  key = key * 4 + (p.aromatic ? (*p.aromatic ? 1 : 0) : 2);
  key = key * 64 + (p.charge ? *p.charge + 16 : 63);
  key = key * 32 + (p.min_degree ? std::min(*p.min_degree, 30) : 31);
  key = key * 32 + (p.h_count ? std::min(*p.h_count, 30) : 31);
  key = key * 2 + (p.label != 0 ? 1 : 0);
  return key;
}

constexpr int kCorrespondenceEdge = 100;

Pattern relabel(const Pattern &p, const std::unordered_map<int, int> &labels) {
  Pattern out;
  for (const AtomPredicate &node: p.nodes()) {
    AtomPredicate copy = node;
    if (copy.label != 0)
      copy.label = labels.at(copy.label);
    out.add_node(copy);
  }
  for (const auto &e: p.edges())
    out.add_edge(e.a, e.b, e.order);
  return out;
}

}  // namespace

ReactionCenter find_reaction_center(const data::ReactionRecord &r) {
  const MappedReaction mr = index_maps(r);
  const MolGraph &R = mr.reactants;
  const MolGraph &P = *mr.product;

  std::vector<int> maps;
  for (const auto &[m, pi]: mr.product_atom)
    maps.push_back(m);
  std::sort(maps.begin(), maps.end());

  ReactionCenter center;
  for (const int m: maps) {
    const int ri = mr.reactant_atom.at(m);
    const int pi = mr.product_atom.at(m);
    unsigned why = 0;
    if (R.atom(ri).charge != P.atom(pi).charge)
      why |= kChargeChanged;
    if (R.total_h(ri) != P.total_h(pi))
      why |= kHydrogenChanged;
    if (R.atom(ri).aromatic != P.atom(pi).aromatic)
      why |= kAromaticChanged;

    std::map<int, BondOrder> before;
    for (const auto &nb: R.neighbors(ri)) {
      const int nm = mr.kept_map(nb.atom);
      if (nm == 0)
        why |= kBondRemoved;  // bond to a leaving atom
      else
        before.emplace(nm, R.bond(nb.bond).order);
    }
    std::map<int, BondOrder> after;
    for (const auto &nb: P.neighbors(pi))
      after.emplace(P.atom(nb.atom).atom_map, P.bond(nb.bond).order);
    for (const auto &[nm, order]: before) {
      auto it = after.find(nm);
      if (it == after.end())
        why |= kBondRemoved;
      else if (it->second != order)
        why |= kBondOrderChanged;
    }
    for (const auto &[nm, order]: after) {
      if (!before.count(nm))
        why |= kBondAdded;
    }

    if (why != 0) {
      center.changed_maps.push_back(m);
      center.reasons[m] = why;
    }
  }

  std::set<int> leaving;
  for (const int m: center.changed_maps) {
    for (const auto &nb: R.neighbors(mr.reactant_atom.at(m))) {
      if (mr.kept_map(nb.atom) == 0)
        leaving.insert(nb.atom);
    }
  }
  center.leaving_attachments.assign(leaving.begin(), leaving.end());
  return center;
}

std::string canonical_template_text(const Pattern &product_core, const Pattern &reactant_core) {
  const int np = product_core.num_nodes();
  const int nr = reactant_core.num_nodes();

  chem::LabeledGraph g;
  g.node_labels.resize(np + nr);
  g.adjacency.resize(np + nr);
  std::unordered_map<int, int> product_node_of_label;
  for (int i = 0; i < np; ++i) {
    g.node_labels[i] = node_key(product_core.node(i), 0);
    if (product_core.node(i).label != 0)
      product_node_of_label[product_core.node(i).label] = i;
  }
  for (int i = 0; i < nr; ++i)
    g.node_labels[np + i] = node_key(reactant_core.node(i), 1);
  for (const auto &e: product_core.edges()) {
    g.adjacency[e.a].push_back({ e.b, static_cast<int>(e.order) + 1 });
    g.adjacency[e.b].push_back({ e.a, static_cast<int>(e.order) + 1 });
  }
  for (const auto &e: reactant_core.edges()) {
    g.adjacency[np + e.a].push_back({ np + e.b, static_cast<int>(e.order) + 1 });
    g.adjacency[np + e.b].push_back({ np + e.a, static_cast<int>(e.order) + 1 });
  }
  for (int i = 0; i < nr; ++i) {
    const int label = reactant_core.node(i).label;
    if (label == 0)
      continue;
    auto it = product_node_of_label.find(label);
    if (it == product_node_of_label.end())
      throw ExtractionError("reactant label " + std::to_string(label) + " missing in product core");
    g.adjacency[it->second].push_back({ np + i, kCorrespondenceEdge });
    g.adjacency[np + i].push_back({ it->second, kCorrespondenceEdge });
  }

  const auto render = [&](std::span<const int> ranks) {
    // Labels follow the product-side canonical order.
    std::vector<int> labelled;
    for (int i = 0; i < np; ++i) {
      if (product_core.node(i).label != 0)
        labelled.push_back(i);
    }
    std::sort(labelled.begin(), labelled.end(),
              [&](int a, int b) { return ranks[a] < ranks[b]; });
    std::unordered_map<int, int> renumber;
    for (std::size_t k = 0; k < labelled.size(); ++k)
      renumber[product_core.node(labelled[k]).label] = static_cast<int>(k) + 1;
    const std::vector<int> pr(ranks.begin(), ranks.begin() + np);
    const std::vector<int> rr(ranks.begin() + np, ranks.end());
    return chem::write_pattern(relabel(product_core, renumber), pr) + ">>"
           + chem::write_pattern(relabel(reactant_core, renumber), rr);
  };
  return render(chem::canonical_order(g, render));
}

RetroTemplate parse_template(std::string_view text, int klass) {
  const auto sep = text.find(">>");
  if (sep == std::string_view::npos || text.find(">>", sep + 2) != std::string_view::npos)
    throw std::invalid_argument("template text needs exactly one '>>'");
  RetroTemplate t;
  t.product_core = chem::parse_pattern(text.substr(0, sep));
  t.reactant_core = chem::parse_pattern(text.substr(sep + 2));
  t.klass = klass;
  t.text = std::string(text);

  std::set<int> product_labels;
  for (const auto &n: t.product_core.nodes()) {
    if (n.label == 0 || !product_labels.insert(n.label).second)
      throw std::invalid_argument("product core nodes need distinct labels");
  }
  std::set<int> reactant_labels;
  for (const auto &n: t.reactant_core.nodes()) {
    if (n.label == 0) {
      if (!n.element)
        throw std::invalid_argument("unlabelled reactant node without element");
      continue;
    }
    if (!reactant_labels.insert(n.label).second)
      throw std::invalid_argument("reactant label repeated");
  }
  if (product_labels != reactant_labels)
    throw std::invalid_argument("product and reactant labels differ");
  return t;
}

RetroTemplate extract_template(const data::ReactionRecord &r) {
  const ReactionCenter center = find_reaction_center(r);
  if (center.empty())
    throw ExtractionError("empty reaction center in " + r.id);

  const MappedReaction mr = index_maps(r);
  const MolGraph &R = mr.reactants;
  const MolGraph &P = *mr.product;

  std::set<int> core(center.changed_maps.begin(), center.changed_maps.end());
  for (const int m: center.changed_maps) {
    for (const auto &nb: P.neighbors(mr.product_atom.at(m)))
      core.insert(P.atom(nb.atom).atom_map);
    for (const auto &nb: R.neighbors(mr.reactant_atom.at(m))) {
      if (const int nm = mr.kept_map(nb.atom); nm != 0)
        core.insert(nm);
    }
  }

  Pattern product_core;
  std::unordered_map<int, int> product_node;  // product atom -> node
  int label = 0;
  std::unordered_map<int, int> label_of_map;
  for (const int m: core) {
    label_of_map[m] = ++label;
    const int pi = mr.product_atom.at(m);
    product_node[pi] = product_core.add_node(predicate_of(P, pi, true, label));
  }
  for (const auto &b: P.bonds()) {
    auto a = product_node.find(b.begin);
    auto c = product_node.find(b.end);
    if (a != product_node.end() && c != product_node.end())
      product_core.add_edge(a->second, c->second, predicate_of(b.order));
  }

  std::set<int> reactant_atoms;
  for (const int m: core)
    reactant_atoms.insert(mr.reactant_atom.at(m));
  reactant_atoms.insert(center.leaving_attachments.begin(), center.leaving_attachments.end());

  Pattern reactant_core;
  std::unordered_map<int, int> reactant_node;
  for (const int ri: reactant_atoms) {
    const int m = mr.kept_map(ri);
    bool with_h = true;
    if (m == 0) {
      // A leaving atom only pins its H count when the window covers all of
      // its neighbours; otherwise the rewrite completes it by valence.
      for (const auto &nb: R.neighbors(ri))
        with_h = with_h && reactant_atoms.count(nb.atom);
    }
    reactant_node[ri] = reactant_core.add_node(
        predicate_of(R, ri, with_h, m == 0 ? 0 : label_of_map.at(m)));
  }
  for (const auto &b: R.bonds()) {
    auto a = reactant_node.find(b.begin);
    auto c = reactant_node.find(b.end);
    if (a != reactant_node.end() && c != reactant_node.end())
      reactant_core.add_edge(a->second, c->second, predicate_of(b.order));
  }

  std::string text;
  try {
    text = canonical_template_text(product_core, reactant_core);
  } catch (const std::exception &e) {
    throw ExtractionError(std::string("cannot serialize template: ") + e.what());
  }
  return parse_template(text, r.klass);
}

bool validate_template(const RetroTemplate &t, const data::ReactionRecord &r) {
  try {
    const std::string reactants = data::reactants_smiles(r);
    const auto retro = apply_retro(t, chem::strip_atom_maps(r.product));
    if (!std::binary_search(retro.begin(), retro.end(), reactants))
      return false;

    MolGraph all;
    for (const auto &m: r.reactants)
      all.append(m);
    const std::string product = data::product_smiles(r);
    const auto forward = apply_forward(t, chem::strip_atom_maps(all));
    return std::binary_search(forward.begin(), forward.end(), product);
  } catch (const std::exception &) {
    return false;
  }
}

}  // namespace retro::rules
