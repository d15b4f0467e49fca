//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/chem/canon.h"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "retro/chem/smiles.h"

namespace retro::chem {
namespace {

std::vector<int> ranks_from_keys(const std::vector<long long> &keys) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> ranks(n);
  for (int k = 0; k < n; ++k) {
    const int i = order[k];
    ranks[i] = (k > 0 && keys[order[k - 1]] == keys[i]) ? ranks[order[k - 1]] : k;
  }
  return ranks;
}

int count_classes(const std::vector<int> &ranks) {
  std::vector<int> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

class OrderSearch {
public:
  OrderSearch(const LabeledGraph &g,
              const std::function<std::string(std::span<const int>)> &leaf_text,
              int budget)
      : g_(g), leaf_text_(leaf_text), budget_(budget) { }

  std::vector<int> run() {
    search(ranks_from_keys(g_.node_labels));
    return best_;
  }

private:
  void search(std::vector<int> ranks) {
    refine_ranks(g_, ranks);
    const int n = static_cast<int>(ranks.size());

    // Smallest rank shared by more than one node.
    std::vector<int> count(n, 0);
    for (const int r: ranks)
      ++count[r];
    int tied = -1;
    for (int r = 0; r < n; ++r) {
      if (count[r] > 1) {
        tied = r;
        break;
      }
    }

    if (tied < 0) {
      ++leaves_;
      std::string text = leaf_text_(ranks);
      if (best_.empty() || text < best_text_) {
        best_text_ = std::move(text);
        best_ = std::move(ranks);
      }
      return;
    }

    bool first = true;
    for (int i = 0; i < n; ++i) {
      if (ranks[i] != tied)
        continue;
      if (!first && leaves_ >= budget_)
        break;
      first = false;
      std::vector<int> next = ranks;
      for (int j = 0; j < n; ++j) {
        if (j != i && ranks[j] == tied)
          next[j] = tied + 1;
      }
      search(std::move(next));
    }
  }

  const LabeledGraph &g_;
  const std::function<std::string(std::span<const int>)> &leaf_text_;
  int budget_;
  int leaves_ = 0;
  std::vector<int> best_;
  std::string best_text_;
};

LabeledGraph labeled_graph(const MolGraph &mol, bool keep_maps) {
  LabeledGraph g;
  const int n = mol.num_atoms();
  g.node_labels.resize(n);
  g.adjacency.resize(n);
  for (int i = 0; i < n; ++i) {
    const Atom &a = mol.atom(i);
    long long key = a.element;
    key = key * 32 + (a.charge + 16);
    key = key * 16 + std::min(mol.degree(i), 15);
    key = key * 16 + std::min(mol.total_h(i), 15);
    key = key * 2 + (a.aromatic ? 1 : 0);
    key = key * 512 + std::min(a.isotope, 511);
    key = key * 4 + static_cast<int>(a.chirality);
    key = key * 131072 + (keep_maps ? std::min(a.atom_map, 131071) : 0);
    g.node_labels[i] = key;
    for (const Neighbor &nb: mol.neighbors(i)) {
      const Bond &b = mol.bond(nb.bond);
      g.adjacency[i].push_back(
          { nb.atom, static_cast<int>(b.order) * 4 + static_cast<int>(b.dir) });
    }
  }
  return g;
}

std::string sorted_text(const MolGraph &mol, std::span<const int> ranks) {
  const std::string raw = write_smiles(mol, ranks);
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = raw.find('.', start);
    parts.push_back(raw.substr(start, dot - start));
    if (dot == std::string::npos)
      break;
    start = dot + 1;
  }
  return join_components(std::move(parts));
}

}  // namespace

void refine_ranks(const LabeledGraph &g, std::vector<int> &ranks) {
  const int n = static_cast<int>(ranks.size());
  int classes = count_classes(ranks);
  using Key = std::pair<int, std::vector<std::pair<int, int>>>;
  std::vector<Key> keys(n);
  while (classes < n) {
    for (int i = 0; i < n; ++i) {
      keys[i].first = ranks[i];
      auto &env = keys[i].second;
      env.clear();
      for (const auto &[j, label]: g.adjacency[i])
        env.emplace_back(label, ranks[j]);
      std::sort(env.begin(), env.end());
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return keys[a] < keys[b]; });
    std::vector<int> next(n);
    for (int k = 0; k < n; ++k) {
      const int i = order[k];
      next[i] = (k > 0 && keys[order[k - 1]] == keys[i]) ? next[order[k - 1]] : k;
    }
    const int next_classes = count_classes(next);
    ranks = std::move(next);
    if (next_classes == classes)
      break;
    classes = next_classes;
  }
}

std::vector<int> canonical_order(
    const LabeledGraph &g,
    const std::function<std::string(std::span<const int>)> &leaf_text,
    int leaf_budget) {
  if (g.node_labels.empty())
    return {};
  return OrderSearch(g, leaf_text, leaf_budget).run();
}

std::vector<int> canonical_ranks(const MolGraph &mol, bool keep_maps) {
  const MolGraph work = keep_maps ? mol : strip_atom_maps(mol);
  const LabeledGraph g = labeled_graph(work, keep_maps);
  return canonical_order(
      g, [&](std::span<const int> ranks) { return sorted_text(work, ranks); });
}

std::string canonical_smiles(const MolGraph &mol, bool keep_maps) {
  const MolGraph work = keep_maps ? mol : strip_atom_maps(mol);
  const std::vector<int> ranks = canonical_ranks(work, keep_maps);
  return sorted_text(work, ranks);
}

std::string canonical_smiles(std::string_view smiles) {
  return canonical_smiles(parse_smiles(smiles));
}

std::vector<std::string> canonical_components(const MolGraph &mol) {
  std::vector<std::string> parts;
  for (const auto &atoms: mol.components())
    parts.push_back(canonical_smiles(mol.subgraph(atoms)));
  std::sort(parts.begin(), parts.end());
  return parts;
}

std::string join_components(std::vector<std::string> parts) {
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0)
      out += '.';
    out += parts[i];
  }
  return out;
}

}  // namespace retro::chem
