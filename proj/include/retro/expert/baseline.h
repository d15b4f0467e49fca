//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <vector>

#include "retro/chem/molecule.h"
#include "retro/rules/rulebase.h"

namespace retro::expert {

struct Candidate {
  std::string reactants;  // canonical, '.'-joined, sorted components
  std::string rule;       // rulebase key of the generating rule
  int count = 0;          // that rule's occurrences for the requested class
  int rank = 0;           // 1-based
};

/// Distinct reactant sets produced by one template on a map-free target.
std::vector<std::string> apply_template(const rules::RetroTemplate &t, const chem::MolGraph &target);

/**
 * Applies every rule with a count for `klass`, pools the candidates, scores
 * each by the largest count among the rules producing it, and returns the
 * top `n` by score (descending) then reactant text (ascending).
 */
std::vector<Candidate> predict_baseline(const rules::RuleBase &rb, const chem::MolGraph &target,
                                        int klass, int n);

}  // namespace retro::expert
