//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/chem/smiles.h"

#include <cctype>
#include <numeric>
#include <vector>

#include <spdlog/spdlog.h>

#include "retro/chem/element.h"
#include "line_notation.h"

namespace retro::chem {
namespace {

bool is_digit(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

int read_int(std::string_view text, std::size_t &pos) {
  int value = 0;
  while (pos < text.size() && is_digit(text[pos])) {
    value = value * 10 + (text[pos] - '0');
    if (value > 100000)
      throw SyntaxError("number too large", pos);
    ++pos;
  }
  return value;
}

Atom read_organic(std::string_view text, std::size_t &pos) {
  Atom atom;
  const char c = text[pos];
  if (c == 'C' && pos + 1 < text.size() && text[pos + 1] == 'l') {
    atom.element = 17;
    pos += 2;
    return atom;
  }
  if (c == 'B' && pos + 1 < text.size() && text[pos + 1] == 'r') {
    atom.element = 35;
    pos += 2;
    return atom;
  }

  switch (c) {
  case 'B':
    atom.element = 5;
    break;
  case 'C':
    atom.element = 6;
    break;
  case 'N':
    atom.element = 7;
    break;
  case 'O':
    atom.element = 8;
    break;
  case 'P':
    atom.element = 15;
    break;
  case 'S':
    atom.element = 16;
    break;
  case 'F':
    atom.element = 9;
    break;
  case 'I':
    atom.element = 53;
    break;
  case 'b':
    atom.element = 5;
    atom.aromatic = true;
    break;
  case 'c':
    atom.element = 6;
    atom.aromatic = true;
    break;
  case 'n':
    atom.element = 7;
    atom.aromatic = true;
    break;
  case 'o':
    atom.element = 8;
    atom.aromatic = true;
    break;
  case 'p':
    atom.element = 15;
    atom.aromatic = true;
    break;
  case 's':
    atom.element = 16;
    atom.aromatic = true;
    break;
  default:
    throw SyntaxError(std::string("unexpected character '") + c + "'", pos);
  }
  ++pos;
  return atom;
}

Atom read_bracket(std::string_view text, std::size_t &pos) {
  const std::size_t open = pos;
  ++pos;  // '['
  auto at_end = [&] { return pos >= text.size(); };

  Atom atom;
  atom.explicit_h = 0;
  if (!at_end() && is_digit(text[pos]))
    atom.isotope = read_int(text, pos);

  if (at_end())
    throw SyntaxError("unterminated bracket atom", open);

  // Element symbol: aromatic lowercase or Capitalised one/two letters.
  const char c = text[pos];
  if (std::islower(static_cast<unsigned char>(c))) {
    std::string sym(1, static_cast<char>(std::toupper(c)));
    std::size_t len = 1;
    if (pos + 1 < text.size() && std::islower(static_cast<unsigned char>(text[pos + 1]))) {
      std::string two = sym + text[pos + 1];
      auto z = element_from_symbol(two);
      if (z && can_be_aromatic(*z)) {
        sym = two;
        len = 2;
      }
    }
    auto z = element_from_symbol(sym);
    if (!z || !can_be_aromatic(*z))
      throw SyntaxError("unknown aromatic element", pos);
    atom.element = *z;
    atom.aromatic = true;
    pos += len;
  } else if (std::isupper(static_cast<unsigned char>(c))) {
    std::optional<int> z;
    if (pos + 1 < text.size() && std::islower(static_cast<unsigned char>(text[pos + 1]))) {
      z = element_from_symbol(text.substr(pos, 2));
      if (z)
        pos += 2;
    }
    if (!z) {
      z = element_from_symbol(text.substr(pos, 1));
      if (!z)
        throw SyntaxError("unknown element", pos);
      ++pos;
    }
    atom.element = *z;
  } else {
    throw SyntaxError("expected element symbol", pos);
  }

  if (!at_end() && text[pos] == '@') {
    ++pos;
    if (!at_end() && text[pos] == '@') {
      ++pos;
      atom.chirality = Chirality::kClockwise;
    } else {
      atom.chirality = Chirality::kCounterClockwise;
    }
  }

  if (!at_end() && text[pos] == 'H') {
    ++pos;
    atom.explicit_h = (!at_end() && is_digit(text[pos])) ? read_int(text, pos) : 1;
  }

  if (!at_end() && (text[pos] == '+' || text[pos] == '-')) {
    const char sign = text[pos];
    const int s = sign == '+' ? 1 : -1;
    ++pos;
    int magnitude = 1;
    if (!at_end() && is_digit(text[pos])) {
      magnitude = read_int(text, pos);
    } else {
      while (!at_end() && text[pos] == sign) {
        ++magnitude;
        ++pos;
      }
    }
    if (magnitude > 8)
      throw SyntaxError("invalid charge", pos);
    atom.charge = s * magnitude;
  }

  if (!at_end() && text[pos] == ':') {
    ++pos;
    if (at_end() || !is_digit(text[pos]))
      throw SyntaxError("atom map without a number", pos);
    atom.atom_map = read_int(text, pos);
  }

  if (at_end() || text[pos] != ']')
    throw SyntaxError("malformed bracket atom", at_end() ? open : pos);
  ++pos;
  return atom;
}

bool is_smiles_bond(char c) {
  switch (c) {
  case '-':
  case '=':
  case '#':
  case ':':
  case '/':
  case '\\':
    return true;
  default:
    return false;
  }
}

void append_atom(std::string &out, const MolGraph &mol, int i) {
  const Atom &a = mol.atom(i);
  std::string_view sym = element_symbol(a.element);

  const bool bare_symbol = a.aromatic ? (in_organic_subset(a.element)
                                         && can_be_aromatic(a.element))
                                      : in_organic_subset(a.element);
  const int h = mol.total_h(i);
  if (bare_symbol && a.charge == 0 && a.isotope == 0 && a.atom_map == 0
      && a.chirality == Chirality::kNone && h == mol.default_h(i)) {
    if (a.aromatic) {
      for (char ch: sym)
        out += static_cast<char>(std::tolower(ch));
    } else {
      out += sym;
    }
    return;
  }

  out += '[';
  if (a.isotope > 0)
    out += std::to_string(a.isotope);
  if (a.aromatic) {
    for (char ch: sym)
      out += static_cast<char>(std::tolower(ch));
  } else {
    out += sym;
  }
  if (a.chirality == Chirality::kCounterClockwise)
    out += '@';
  else if (a.chirality == Chirality::kClockwise)
    out += "@@";
  if (h > 0) {
    out += 'H';
    if (h > 1)
      out += std::to_string(h);
  }
  if (a.charge != 0) {
    out += a.charge > 0 ? '+' : '-';
    if (std::abs(a.charge) > 1)
      out += std::to_string(std::abs(a.charge));
  }
  if (a.atom_map > 0) {
    out += ':';
    out += std::to_string(a.atom_map);
  }
  out += ']';
}

void append_bond(std::string &out, const MolGraph &mol, int edge, int from, int to) {
  const Bond &b = mol.bond(edge);
  const bool both_aromatic = mol.atom(from).aromatic && mol.atom(to).aromatic;
  if (b.dir != BondDir::kNone) {
    const char forward = b.dir == BondDir::kUp ? '/' : '\\';
    out += from == b.begin ? forward : internal::flip_direction(forward);
    return;
  }
  switch (b.order) {
  case BondOrder::kSingle:
    if (both_aromatic)
      out += '-';
    break;
  case BondOrder::kDouble:
    out += '=';
    break;
  case BondOrder::kTriple:
    out += '#';
    break;
  case BondOrder::kAromatic:
    if (!both_aromatic)
      out += ':';
    break;
  }
}

}  // namespace

MolGraph parse_smiles(std::string_view text, const SmilesOptions &opts) {
  if (text.empty())
    throw SyntaxError("empty SMILES", 0);

  MolGraph mol;
  internal::LineReader reader;
  reader.atom = [&](std::string_view t, std::size_t &pos) {
    const Atom atom = t[pos] == '[' ? read_bracket(t, pos) : read_organic(t, pos);
    return mol.add_atom(atom);
  };
  reader.is_bond_symbol = is_smiles_bond;
  reader.edge = [&](int from, int to, char symbol, std::size_t pos) {
    BondOrder order = BondOrder::kSingle;
    BondDir dir = BondDir::kNone;
    switch (symbol) {
    case '\0':
      if (mol.atom(from).aromatic && mol.atom(to).aromatic)
        order = BondOrder::kAromatic;
      break;
    case '=':
      order = BondOrder::kDouble;
      break;
    case '#':
      order = BondOrder::kTriple;
      break;
    case ':':
      order = BondOrder::kAromatic;
      break;
    case '/':
      dir = BondDir::kUp;
      break;
    case '\\':
      dir = BondDir::kDown;
      break;
    default:
      break;
    }
    if (mol.bond_between(from, to))
      throw SyntaxError("duplicate bond between the same atoms", pos);
    mol.add_bond(from, to, order, dir);
  };
  internal::read_line(text, reader);

  for (int i = 0; i < mol.num_atoms(); ++i) {
    if (mol.valence_ok(i))
      continue;
    const std::string msg = "atom " + std::to_string(i) + " ("
                            + std::string(element_symbol(mol.atom(i).element))
                            + ") exceeds its allowed valence";
    if (opts.strict_valence)
      throw ValenceError(msg, 0);
    spdlog::warn("{} in '{}'", msg, text);
  }
  return mol;
}

std::string write_smiles(const MolGraph &mol, std::span<const int> ranks) {
  internal::Adjacency adj(mol.num_atoms());
  for (int i = 0; i < mol.num_atoms(); ++i)
    adj[i].assign(mol.neighbors(i).begin(), mol.neighbors(i).end());

  internal::LineWriter writer;
  writer.atom = [&](std::string &out, int i) { append_atom(out, mol, i); };
  writer.bond = [&](std::string &out, int e, int from, int to) {
    append_bond(out, mol, e, from, to);
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

std::string write_smiles(const MolGraph &mol) {
  std::vector<int> ranks(mol.num_atoms());
  std::iota(ranks.begin(), ranks.end(), 0);
  return write_smiles(mol, ranks);
}

}  // namespace retro::chem
