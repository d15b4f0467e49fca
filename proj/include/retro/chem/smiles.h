//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "retro/chem/molecule.h"

namespace retro::chem {

class SyntaxError: public std::runtime_error {
public:
  SyntaxError(const std::string &what, std::size_t position)
      : std::runtime_error(what), position_(position) { }

  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

/// Raised in strict mode for atoms exceeding every allowed valence.
class ValenceError: public SyntaxError {
public:
  using SyntaxError::SyntaxError;
};

struct SmilesOptions {
  // Strict mode rejects over-valent atoms; lenient mode logs and accepts.
  bool strict_valence = true;
};

/**
 * Parses the supported SMILES subset: organic-subset atoms bare, everything
 * else in brackets (isotope, chirality, H count, charge, atom map), bond
 * symbols - = # : / \, branches, ring closures including %nn and '.'
 * component separators. Aromaticity is taken as written.
 *
 * Throws SyntaxError on malformed input (ValenceError for valence
 * violations in strict mode).
 */
MolGraph parse_smiles(std::string_view text, const SmilesOptions &opts = {});

/// Writes `mol` with a depth-first traversal that starts each component at
/// its lowest-ranked atom and visits neighbours in rank order. Components
/// appear in order of their lowest rank. Atom maps are written when set.
std::string write_smiles(const MolGraph &mol, std::span<const int> ranks);

/// Same, using atom indices as ranks.
std::string write_smiles(const MolGraph &mol);

}  // namespace retro::chem
