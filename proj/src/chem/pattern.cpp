//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/chem/pattern.h"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "retro/chem/element.h"
#include "retro/chem/smiles.h"
#include "line_notation.h"

namespace retro::chem {

bool AtomPredicate::matches(const MolGraph &mol, int atom) const {
  const Atom &a = mol.atom(atom);
  if (element && *element != a.element)
    return false;
  if (aromatic && *aromatic != a.aromatic)
    return false;
  if (charge && *charge != a.charge)
    return false;
  if (min_degree && mol.degree(atom) < *min_degree)
    return false;
  if (h_count && *h_count != mol.total_h(atom))
    return false;
  return true;
}

bool bond_matches(BondPredicate pred, BondOrder order) {
  switch (pred) {
  case BondPredicate::kSingle:
    return order == BondOrder::kSingle;
  case BondPredicate::kDouble:
    return order == BondOrder::kDouble;
  case BondPredicate::kTriple:
    return order == BondOrder::kTriple;
  case BondPredicate::kAromatic:
    return order == BondOrder::kAromatic;
  case BondPredicate::kAny:
    return true;
  }
  return false;
}

int Pattern::add_node(const AtomPredicate &pred) {
  nodes_.push_back(pred);
  adj_.emplace_back();
  return num_nodes() - 1;
}

int Pattern::add_edge(int a, int b, BondPredicate order) {
  if (a == b || a < 0 || b < 0 || a >= num_nodes() || b >= num_nodes())
    throw std::invalid_argument("bad pattern edge");
  if (edge_between(a, b))
    throw std::invalid_argument("duplicate pattern edge");
  edges_.push_back({ a, b, order });
  const int idx = num_edges() - 1;
  adj_[a].push_back({ b, idx });
  adj_[b].push_back({ a, idx });
  return idx;
}

std::optional<int> Pattern::edge_between(int a, int b) const {
  for (const Neighbor &nb: adj_[a]) {
    if (nb.atom == b)
      return nb.bond;
  }
  return std::nullopt;
}

std::vector<std::vector<int>> Pattern::components() const {
  std::vector<int> comp(num_nodes(), -1);
  std::vector<std::vector<int>> result;
  for (int s = 0; s < num_nodes(); ++s) {
    if (comp[s] >= 0)
      continue;
    const int c = static_cast<int>(result.size());
    result.emplace_back();
    std::vector<int> stack { s };
    comp[s] = c;
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

namespace {

class Matcher {
public:
  Matcher(const Pattern &p, const MolGraph &mol): p_(p), mol_(mol) {
    const int n = p.num_nodes();
    // Breadth-first order per component so that every node after the
    // first of its component has an already placed anchor neighbour.
    std::vector<char> placed(n, 0);
    anchor_.assign(n, -1);
    for (const auto &comp: p.components()) {
      std::vector<int> queue { comp.front() };
      placed[comp.front()] = 1;
      for (std::size_t q = 0; q < queue.size(); ++q) {
        const int u = queue[q];
        order_.push_back(u);
        std::vector<Neighbor> nbs(p.neighbors(u).begin(), p.neighbors(u).end());
        std::sort(nbs.begin(), nbs.end(),
                  [](const Neighbor &a, const Neighbor &b) { return a.atom < b.atom; });
        for (const Neighbor &nb: nbs) {
          if (!placed[nb.atom]) {
            placed[nb.atom] = 1;
            anchor_[nb.atom] = u;
            queue.push_back(nb.atom);
          }
        }
      }
    }
    map_.assign(n, -1);
    used_.assign(mol.num_atoms(), 0);
  }

  std::vector<Embedding> run() {
    if (p_.num_nodes() == 0 || p_.num_nodes() > mol_.num_atoms())
      return {};
    extend(0);
    std::sort(results_.begin(), results_.end());
    return std::move(results_);
  }

private:
  bool feasible(int node, int atom) const {
    if (used_[atom] || !p_.node(node).matches(mol_, atom))
      return false;
    for (const Neighbor &nb: p_.neighbors(node)) {
      const int other = map_[nb.atom];
      if (other < 0)
        continue;
      auto bond = mol_.bond_between(atom, other);
      if (!bond || !bond_matches(p_.edge(nb.bond).order, mol_.bond(*bond).order))
        return false;
    }
    return true;
  }

  void extend(std::size_t depth) {
    if (depth == order_.size()) {
      results_.push_back(map_);
      return;
    }
    const int node = order_[depth];
    auto place = [&](int atom) {
      if (!feasible(node, atom))
        return;
      map_[node] = atom;
      used_[atom] = 1;
      extend(depth + 1);
      used_[atom] = 0;
      map_[node] = -1;
    };

    if (anchor_[node] >= 0) {
      for (const Neighbor &nb: mol_.neighbors(map_[anchor_[node]]))
        place(nb.atom);
    } else {
      for (int atom = 0; atom < mol_.num_atoms(); ++atom)
        place(atom);
    }
  }

  const Pattern &p_;
  const MolGraph &mol_;
  std::vector<int> order_;
  std::vector<int> anchor_;
  std::vector<int> map_;
  std::vector<char> used_;
  std::vector<Embedding> results_;
};

void append_node(std::string &out, const AtomPredicate &pred) {
  std::vector<std::string> prims;
  if (pred.element && pred.aromatic) {
    std::string sym(element_symbol(*pred.element));
    if (*pred.aromatic) {
      for (char &ch: sym)
        ch = static_cast<char>(std::tolower(ch));
    }
    prims.push_back(sym);
  } else if (pred.element) {
    prims.push_back("#" + std::to_string(*pred.element));
  } else if (pred.aromatic) {
    prims.push_back(*pred.aromatic ? "a" : "A");
  } else {
    prims.push_back("*");
  }
  if (pred.charge)
    prims.push_back((*pred.charge < 0 ? "-" : "+") + std::to_string(std::abs(*pred.charge)));
  if (pred.min_degree)
    prims.push_back("D" + std::to_string(*pred.min_degree));
  if (pred.h_count)
    prims.push_back("H" + std::to_string(*pred.h_count));

  out += '[';
  for (std::size_t i = 0; i < prims.size(); ++i) {
    if (i > 0)
      out += ';';
    out += prims[i];
  }
  if (pred.label > 0)
    out += ':' + std::to_string(pred.label);
  out += ']';
}

char bond_symbol(BondPredicate pred) {
  switch (pred) {
  case BondPredicate::kSingle:
    return '-';
  case BondPredicate::kDouble:
    return '=';
  case BondPredicate::kTriple:
    return '#';
  case BondPredicate::kAromatic:
    return ':';
  case BondPredicate::kAny:
    return '~';
  }
  return '~';
}

bool all_digits(std::string_view s) {
  return !s.empty()
         && std::all_of(s.begin(), s.end(),
                        [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

int to_int(std::string_view s, std::size_t pos) {
  if (!all_digits(s) || s.size() > 6)
    throw SyntaxError("expected a number in pattern primitive", pos);
  return std::stoi(std::string(s));
}

void apply_primitive(AtomPredicate &pred, std::string_view tok, std::size_t pos) {
  if (tok.empty())
    throw SyntaxError("empty pattern primitive", pos);
  if (tok == "*")
    return;
  if (tok == "a" || tok == "A") {
    pred.aromatic = tok == "a";
    return;
  }
  if (tok[0] == '#') {
    const int z = to_int(tok.substr(1), pos);
    if (z < 1 || z > kMaxAtomicNumber)
      throw SyntaxError("atomic number out of range", pos);
    pred.element = z;
    return;
  }
  if (tok[0] == '+' || tok[0] == '-') {
    const int mag = to_int(tok.substr(1), pos);
    pred.charge = tok[0] == '+' ? mag : -mag;
    return;
  }
  if (tok[0] == 'D' && tok.size() > 1 && all_digits(tok.substr(1))) {
    pred.min_degree = to_int(tok.substr(1), pos);
    return;
  }
  if (tok[0] == 'H' && tok.size() > 1 && all_digits(tok.substr(1))) {
    pred.h_count = to_int(tok.substr(1), pos);
    return;
  }

  const bool aromatic = std::islower(static_cast<unsigned char>(tok[0])) != 0;
  std::string sym(tok);
  sym[0] = static_cast<char>(std::toupper(sym[0]));
  auto z = element_from_symbol(sym);
  if (!z || (aromatic && !can_be_aromatic(*z)))
    throw SyntaxError("unknown element in pattern: " + std::string(tok), pos);
  pred.element = *z;
  pred.aromatic = aromatic;
}

AtomPredicate read_node(std::string_view text, std::size_t &pos) {
  const std::size_t open = pos;
  if (text[pos] != '[')
    throw SyntaxError("pattern atoms must be bracketed", pos);
  const std::size_t close = text.find(']', pos);
  if (close == std::string_view::npos)
    throw SyntaxError("unterminated pattern atom", open);

  std::string_view body = text.substr(pos + 1, close - pos - 1);
  AtomPredicate pred;
  const std::size_t colon = body.find(':');
  if (colon != std::string_view::npos) {
    pred.label = to_int(body.substr(colon + 1), open);
    body = body.substr(0, colon);
  }

  std::size_t start = 0;
  while (true) {
    const std::size_t semi = body.find(';', start);
    apply_primitive(pred, body.substr(start, semi - start), open + 1 + start);
    if (semi == std::string_view::npos)
      break;
    start = semi + 1;
  }
  pos = close + 1;
  return pred;
}

}  // namespace

std::vector<Embedding> match_pattern(const Pattern &pattern, const MolGraph &mol) {
  return Matcher(pattern, mol).run();
}

std::string write_pattern(const Pattern &pattern, std::span<const int> ranks) {
  internal::Adjacency adj(pattern.num_nodes());
  for (int i = 0; i < pattern.num_nodes(); ++i)
    adj[i].assign(pattern.neighbors(i).begin(), pattern.neighbors(i).end());

  internal::LineWriter writer;
  writer.atom = [&](std::string &out, int i) { append_node(out, pattern.node(i)); };
  writer.bond = [&](std::string &out, int e, int, int) {
    out += bond_symbol(pattern.edge(e).order);
  };
  const auto parts = internal::write_components(adj, ranks, writer);
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0)
      out += '.';
    out += parts[i];
  }
  return out;
}

std::string write_pattern(const Pattern &pattern) {
  std::vector<int> ranks(pattern.num_nodes());
  std::iota(ranks.begin(), ranks.end(), 0);
  return write_pattern(pattern, ranks);
}

Pattern parse_pattern(std::string_view text) {
  if (text.empty())
    throw SyntaxError("empty pattern", 0);
  Pattern p;
  internal::LineReader reader;
  reader.atom = [&](std::string_view t, std::size_t &pos) {
    return p.add_node(read_node(t, pos));
  };
  reader.is_bond_symbol = [](char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '~';
  };
  reader.edge = [&](int from, int to, char symbol, std::size_t pos) {
    BondPredicate order = BondPredicate::kSingle;
    switch (symbol) {
    case '=':
      order = BondPredicate::kDouble;
      break;
    case '#':
      order = BondPredicate::kTriple;
      break;
    case ':':
      order = BondPredicate::kAromatic;
      break;
    case '~':
      order = BondPredicate::kAny;
      break;
    default:
      break;
    }
    if (p.edge_between(from, to))
      throw SyntaxError("duplicate pattern edge", pos);
    p.add_edge(from, to, order);
  };
  internal::read_line(text, reader);
  return p;
}

AtomPredicate describe_atom(const MolGraph &mol, int atom) {
  const Atom &a = mol.atom(atom);
  AtomPredicate pred;
  pred.element = a.element;
  pred.aromatic = a.aromatic;
  pred.charge = a.charge;
  pred.min_degree = mol.degree(atom);
  pred.h_count = mol.total_h(atom);
  pred.label = a.atom_map;
  return pred;
}

}  // namespace retro::chem
