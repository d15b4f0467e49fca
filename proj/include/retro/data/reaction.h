//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "retro/chem/molecule.h"
#include "retro/chem/smiles.h"

namespace retro::data {

inline constexpr int kNumClasses = 10;

class FormatError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ReactionRecord {
  std::string id;
  int klass = 0;
  // One graph per reactant molecule.
  std::vector<chem::MolGraph> reactants;
  // Single component after split_multiproduct.
  chem::MolGraph product;
  std::string raw_text;
};

/// Splits "reactants>reagents>products" and parses both outer fields; the
/// reagent field is discarded. Throws FormatError / chem::SyntaxError.
ReactionRecord parse_reaction(std::string id, int klass, std::string_view reaction_smiles,
                              const chem::SmilesOptions &opts = {});

struct LoadResult {
  std::vector<ReactionRecord> records;
  int skipped = 0;
};

/**
 * Reads the tab-separated dataset: columns id, class, reaction_smiles.
 * A first line starting with "id\t" is treated as a header. Malformed
 * lines are logged and counted, never fatal. Throws IoError when the file
 * cannot be opened.
 */
LoadResult load_reactions(const std::filesystem::path &path,
                          const chem::SmilesOptions &opts = {});

LoadResult load_reactions_from_string(std::string_view contents,
                                      const chem::SmilesOptions &opts = {});

/// One record per product component, each keeping all reactants. Ids get
/// a "_p<k>" suffix when there is more than one product.
std::vector<ReactionRecord> split_multiproduct(const ReactionRecord &r);

struct TrivialFilter {
  int max_trivial_heavy_atoms = 3;
  // Canonical SMILES forced trivial / forced kept, checked first.
  std::vector<std::string> always_trivial;
  std::vector<std::string> never_trivial;
};

struct FilterResult {
  std::vector<ReactionRecord> kept;
  std::map<std::string, int> removed;  // reason -> count
};

/// Empty string when the product is kept, otherwise the removal reason.
std::string trivial_reason(const chem::MolGraph &product, const TrivialFilter &cfg);

FilterResult filter_trivial(std::vector<ReactionRecord> records,
                            const TrivialFilter &cfg = {});

/// Canonical, map-free product SMILES.
std::string product_smiles(const ReactionRecord &r);

/// Canonical, map-free reactant SMILES, components sorted and '.'-joined.
std::string reactants_smiles(const ReactionRecord &r);

/// "reactants>>product" with atom maps kept.
std::string mapped_reaction_smiles(const ReactionRecord &r);

}  // namespace retro::data
