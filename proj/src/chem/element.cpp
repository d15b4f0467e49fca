//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/chem/element.h"

#include <array>

namespace retro::chem {
namespace {

constexpr std::array<std::string_view, kMaxAtomicNumber + 1> kSymbols = {
  "*",  "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
  "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
  "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
  "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
  "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
  "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
  "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am",
  "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh",
  "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
};

constexpr std::array<int, 1> kVal1 = { 1 };
constexpr std::array<int, 1> kVal2 = { 2 };
constexpr std::array<int, 1> kVal3 = { 3 };
constexpr std::array<int, 1> kVal4 = { 4 };
constexpr std::array<int, 2> kVal35 = { 3, 5 };
constexpr std::array<int, 3> kVal246 = { 2, 4, 6 };

std::span<const int> neutral_valences(int z) {
  switch (z) {
  case 5:
    return kVal3;
  case 6:
    return kVal4;
  case 7:
  case 15:
    return kVal35;
  case 8:
    return kVal2;
  case 16:
    return kVal246;
  case 9:
  case 17:
  case 35:
  case 53:
    return kVal1;
  default:
    return {};
  }
}

}  // namespace

std::optional<int> element_from_symbol(std::string_view symbol) {
  for (int z = 1; z <= kMaxAtomicNumber; ++z) {
    if (kSymbols[z] == symbol)
      return z;
  }
  return std::nullopt;
}

std::string_view element_symbol(int atomic_number) {
  if (atomic_number < 0 || atomic_number > kMaxAtomicNumber)
    return "?";
  return kSymbols[atomic_number];
}

bool in_organic_subset(int z) {
  switch (z) {
  case 5:
  case 6:
  case 7:
  case 8:
  case 9:
  case 15:
  case 16:
  case 17:
  case 35:
  case 53:
    return true;
  default:
    return false;
  }
}

bool can_be_aromatic(int z) {
  switch (z) {
  case 5:
  case 6:
  case 7:
  case 8:
  case 15:
  case 16:
  case 33:
  case 34:
  case 52:
    return true;
  default:
    return false;
  }
}

std::span<const int> allowed_valences(int z, int charge) {
  if (charge == 0)
    return neutral_valences(z);
  // Only shift within the same row of the p block.
  const int shifted = z - charge;
  const bool row2 = z >= 5 && z <= 9 && shifted >= 5 && shifted <= 9;
  const bool row3 = z >= 13 && z <= 17 && shifted >= 13 && shifted <= 17;
  if (!row2 && !row3)
    return {};
  if (shifted == 13)
    return kVal3;
  if (shifted == 14)
    return kVal4;
  return neutral_valences(shifted);
}

}  // namespace retro::chem
