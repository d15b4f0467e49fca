//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "retro/chem/pattern.h"
#include "retro/data/reaction.h"

namespace retro::rules {

class MappingError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ExtractionError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Why an atom belongs to the reaction center; bit flags.
enum ChangeReason : std::uint8_t {
  kBondAdded = 1,
  kBondRemoved = 2,
  kBondOrderChanged = 4,
  kChargeChanged = 8,
  kHydrogenChanged = 16,
  kAromaticChanged = 32,
};

struct ReactionCenter {
  // Map ids whose environment changed; the same ids identify the product
  // and reactant occurrences, so one sorted list serves both sides.
  std::vector<int> changed_maps;
  // Map id -> ChangeReason bits.
  std::map<int, unsigned> reasons;
  // Indices into the concatenated reactant graph of unmapped atoms bonded
  // to a center atom (leaving-group attachment points).
  std::vector<int> leaving_attachments;

  bool empty() const { return changed_maps.empty(); }
};

/**
 * Atom-map diff between reactants and product. Reactant atoms whose map id
 * does not occur in the product count as unmapped. Throws MappingError when
 * a product atom is unmapped, has no reactant counterpart, or a map id is
 * repeated on one side.
 */
ReactionCenter find_reaction_center(const data::ReactionRecord &r);

/**
 * Retro rewrite rule. `product_core` is matched on the target; its nodes
 * all carry correspondence labels 1..k. `reactant_core` (one component per
 * reactant fragment) repeats the labelled nodes with their reactant-side
 * predicates plus unlabelled leaving-group atoms.
 */
struct RetroTemplate {
  chem::Pattern product_core;
  chem::Pattern reactant_core;
  int klass = 0;
  // "product>>reactants" in the pattern text form.
  std::string text;
};

/// Throws ExtractionError when the center is empty; MappingError as above.
RetroTemplate extract_template(const data::ReactionRecord &r);

/// Canonical text of a product/reactant core pair; independent of node
/// order and of the label numbering.
std::string canonical_template_text(const chem::Pattern &product_core,
                                    const chem::Pattern &reactant_core);

/// Throws chem::SyntaxError or std::invalid_argument on malformed text.
RetroTemplate parse_template(std::string_view text, int klass = 0);

/// Bidirectional check against the source reaction: retro application on
/// the product must reproduce the reactant multiset and forward application
/// on the reactants must reproduce the product.
bool validate_template(const RetroTemplate &t, const data::ReactionRecord &r);

}  // namespace retro::rules
