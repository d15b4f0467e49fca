//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "line_notation.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

#include "retro/chem/smiles.h"

namespace retro::chem::internal {
namespace {

struct OpenRing {
  int atom;
  char symbol;
  std::size_t pos;
};

int read_ring_number(std::string_view text, std::size_t &pos) {
  if (text[pos] == '%') {
    if (pos + 2 >= text.size()
        || !std::isdigit(static_cast<unsigned char>(text[pos + 1]))
        || !std::isdigit(static_cast<unsigned char>(text[pos + 2]))) {
      throw SyntaxError("'%' must be followed by two digits", pos);
    }
    const int num = (text[pos + 1] - '0') * 10 + (text[pos + 2] - '0');
    pos += 3;
    return num;
  }
  return text[pos++] - '0';
}

std::string ring_label(int digit) {
  if (digit < 10)
    return std::string(1, static_cast<char>('0' + digit));
  return "%" + std::to_string(digit);
}

}  // namespace

char flip_direction(char symbol) {
  switch (symbol) {
  case '/':
    return '\\';
  case '\\':
    return '/';
  default:
    return symbol;
  }
}

void read_line(std::string_view text, const LineReader &reader) {
  std::vector<int> branch_stack;
  std::map<int, OpenRing> open_rings;
  int prev = -1;
  char pending = '\0';
  std::size_t pending_pos = 0;
  // Whether an atom was read since the last '('.
  bool branch_has_atom = true;

  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '(') {
      if (prev < 0)
        throw SyntaxError("branch without a preceding atom", pos);
      if (pending != '\0')
        throw SyntaxError("bond symbol before '('", pos);
      branch_stack.push_back(prev);
      branch_has_atom = false;
      ++pos;
    } else if (c == ')') {
      if (branch_stack.empty())
        throw SyntaxError("unbalanced ')'", pos);
      if (pending != '\0')
        throw SyntaxError("dangling bond symbol before ')'", pos);
      if (!branch_has_atom)
        throw SyntaxError("empty branch", pos);
      prev = branch_stack.back();
      branch_stack.pop_back();
      ++pos;
    } else if (c == '.') {
      if (pending != '\0')
        throw SyntaxError("bond symbol before '.'", pos);
      if (!branch_stack.empty())
        throw SyntaxError("'.' inside a branch", pos);
      if (prev < 0)
        throw SyntaxError("empty component", pos);
      prev = -1;
      ++pos;
    } else if (reader.is_bond_symbol(c)) {
      if (prev < 0)
        throw SyntaxError("bond symbol without a preceding atom", pos);
      if (pending != '\0')
        throw SyntaxError("two consecutive bond symbols", pos);
      pending = c;
      pending_pos = pos;
      ++pos;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
      if (prev < 0)
        throw SyntaxError("ring closure without a preceding atom", pos);
      const std::size_t start = pos;
      const int num = read_ring_number(text, pos);
      auto it = open_rings.find(num);
      if (it == open_rings.end()) {
        open_rings.emplace(num, OpenRing { prev, pending, start });
      } else {
        const OpenRing ring = it->second;
        open_rings.erase(it);
        char symbol = ring.symbol;
        const char closing = flip_direction(pending);
        if (symbol == '\0')
          symbol = closing;
        else if (pending != '\0' && closing != symbol)
          throw SyntaxError("conflicting ring-closure bond symbols", start);
        if (ring.atom == prev)
          throw SyntaxError("ring closure to the same atom", start);
        reader.edge(ring.atom, prev, symbol, start);
      }
      pending = '\0';
    } else {
      const std::size_t start = pos;
      const int idx = reader.atom(text, pos);
      if (prev >= 0)
        reader.edge(prev, idx, pending, start);
      else if (pending != '\0')
        throw SyntaxError("bond symbol without a preceding atom", pending_pos);
      pending = '\0';
      prev = idx;
      branch_has_atom = true;
    }
  }

  if (pending != '\0')
    throw SyntaxError("dangling bond symbol at end of input", pending_pos);
  if (!branch_stack.empty())
    throw SyntaxError("unbalanced '('", text.size());
  if (!open_rings.empty())
    throw SyntaxError("unclosed ring bond " + std::to_string(open_rings.begin()->first),
                      open_rings.begin()->second.pos);
  if (prev < 0)
    throw SyntaxError("empty component", text.size());
}

namespace {

struct Closure {
  int edge;
  int partner;
  bool opening;
};

class ComponentWriter {
public:
  ComponentWriter(const Adjacency &adj, std::span<const int> ranks,
                  const LineWriter &writer, std::vector<char> &visited)
      : adj_(adj), ranks_(ranks), writer_(writer), visited_(visited),
        children_(adj.size()), closures_(adj.size()),
        ring_seen_(count_edges(adj), false) { }

  std::string write(int start) {
    layout(start, -1);
    std::string out;
    emit(out, start, -1, -1);
    return out;
  }

private:
  static std::size_t count_edges(const Adjacency &adj) {
    int max_edge = -1;
    for (const auto &nbs: adj) {
      for (const Neighbor &nb: nbs)
        max_edge = std::max(max_edge, nb.bond);
    }
    return static_cast<std::size_t>(max_edge + 1);
  }

  std::vector<Neighbor> ordered_neighbors(int u) const {
    std::vector<Neighbor> nbs(adj_[u].begin(), adj_[u].end());
    std::sort(nbs.begin(), nbs.end(), [&](const Neighbor &a, const Neighbor &b) {
      return ranks_[a.atom] < ranks_[b.atom];
    });
    return nbs;
  }

  void layout(int u, int parent_edge) {
    visited_[u] = 1;
    for (const Neighbor &nb: ordered_neighbors(u)) {
      if (nb.bond == parent_edge)
        continue;
      if (!visited_[nb.atom]) {
        children_[u].push_back(nb);
        layout(nb.atom, nb.bond);
      } else if (!ring_seen_[nb.bond]) {
        ring_seen_[nb.bond] = true;
        closures_[nb.atom].push_back({ nb.bond, u, true });
        closures_[u].push_back({ nb.bond, nb.atom, false });
      }
    }
  }

  int take_digit() {
    for (int d = 1;; ++d) {
      if (std::find(used_.begin(), used_.end(), d) == used_.end()) {
        used_.push_back(d);
        return d;
      }
    }
  }

  void emit(std::string &out, int u, int parent_edge, int from) {
    if (parent_edge >= 0)
      writer_.bond(out, parent_edge, from, u);
    writer_.atom(out, u);

    std::vector<int> released;
    for (const Closure &c: closures_[u]) {
      if (c.opening) {
        const int d = take_digit();
        digit_of_edge_[c.edge] = d;
        writer_.bond(out, c.edge, u, c.partner);
        out += ring_label(d);
      } else {
        const int d = digit_of_edge_.at(c.edge);
        out += ring_label(d);
        released.push_back(d);
      }
    }
    for (const int d: released)
      used_.erase(std::find(used_.begin(), used_.end(), d));

    const auto &kids = children_[u];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const bool branch = k + 1 < kids.size();
      if (branch)
        out += '(';
      emit(out, kids[k].atom, kids[k].bond, u);
      if (branch)
        out += ')';
    }
  }

  const Adjacency &adj_;
  std::span<const int> ranks_;
  const LineWriter &writer_;
  std::vector<char> &visited_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<std::vector<Closure>> closures_;
  std::vector<bool> ring_seen_;
  std::map<int, int> digit_of_edge_;
  std::vector<int> used_;
};

}  // namespace

std::vector<std::string> write_components(const Adjacency &adj,
                                          std::span<const int> ranks,
                                          const LineWriter &writer) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> by_rank(n);
  std::iota(by_rank.begin(), by_rank.end(), 0);
  std::sort(by_rank.begin(), by_rank.end(),
            [&](int a, int b) { return ranks[a] < ranks[b]; });

  std::vector<char> visited(n, 0);
  std::vector<std::string> parts;
  for (const int start: by_rank) {
    if (visited[start])
      continue;
    ComponentWriter cw(adj, ranks, writer, visited);
    parts.push_back(cw.write(start));
  }
  return parts;
}

}  // namespace retro::chem::internal
