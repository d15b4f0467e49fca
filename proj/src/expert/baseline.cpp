//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/expert/baseline.h"

#include <algorithm>
#include <map>

#include "retro/rules/apply.h"

namespace retro::expert {

std::vector<std::string> apply_template(const rules::RetroTemplate &t,
                                        const chem::MolGraph &target) {
  return rules::apply_retro(t, chem::strip_atom_maps(target));
}

std::vector<Candidate> predict_baseline(const rules::RuleBase &rb, const chem::MolGraph &target,
                                        int klass, int n) {
  if (n <= 0)
    return {};
  const chem::MolGraph clean = chem::strip_atom_maps(target);

  // Rules come in text order, so the first rule reaching the best count is
  // the recorded provenance.
  std::map<std::string, Candidate> pool;
  for (const rules::Rule *rule: rb.rules_for_class(klass)) {
    const int count = rule->count_for(klass);
    for (auto &set: rules::apply_retro(*rule->parsed, clean)) {
      auto [it, fresh] = pool.try_emplace(set);
      if (fresh || count > it->second.count) {
        it->second.reactants = set;
        it->second.rule = rule->text;
        it->second.count = count;
      }
    }
  }

  std::vector<Candidate> ranked;
  ranked.reserve(pool.size());
  for (auto &[text, c]: pool)
    ranked.push_back(std::move(c));
  std::stable_sort(ranked.begin(), ranked.end(), [](const Candidate &a, const Candidate &b) {
    if (a.count != b.count)
      return a.count > b.count;
    return a.reactants < b.reactants;
  });
  if (static_cast<int>(ranked.size()) > n)
    ranked.resize(n);
  for (std::size_t i = 0; i < ranked.size(); ++i)
    ranked[i].rank = static_cast<int>(i) + 1;
  return ranked;
}

}  // namespace retro::expert
