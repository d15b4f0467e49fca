//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "retro/chem/molecule.h"
#include "retro/rules/template.h"

namespace retro::rules {

class RewriteFailure: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/**
 * Rewrites `target` at one embedding of the product core: core bonds are
 * replaced by the reactant-core bonds, labelled atoms take the reactant
 * charge, aromatic flag and H count, and leaving-group atoms are added.
 * A leaving-group atom keeps its recorded H count when the pattern states
 * one and is completed by valence otherwise. Throws RewriteFailure when the
 * result is not a sane graph.
 */
chem::MolGraph rewrite_retro(const RetroTemplate &t, const chem::MolGraph &target,
                             const chem::Embedding &embedding);

/// Forward counterpart on the reactant graph; unlabelled core atoms are
/// deleted and only components holding labelled atoms are kept.
chem::MolGraph rewrite_forward(const RetroTemplate &t, const chem::MolGraph &reactants,
                               const chem::Embedding &embedding);

/**
 * Distinct canonical reactant sets ('.'-joined, sorted components) over all
 * embeddings of the product core in `target`, in lexicographic order.
 * Failed rewrites are skipped.
 */
std::vector<std::string> apply_retro(const RetroTemplate &t, const chem::MolGraph &target);

/// Distinct canonical products over all embeddings of the reactant core.
std::vector<std::string> apply_forward(const RetroTemplate &t, const chem::MolGraph &reactants);

}  // namespace retro::rules
