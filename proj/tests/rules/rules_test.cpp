//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <map>
#include <set>

#include <doctest.h>

#include "retro/chem/canon.h"
#include "retro/rules/apply.h"
#include "retro/rules/rulebase.h"
#include "synthetic.h"

namespace retro::rules {
namespace {

const char *kEster =
    "[CH3:1][C:2](=[O:3])[OH:4].[OH:5][CH2:6][CH3:7]>>[CH3:1][C:2](=[O:3])[O:5][CH2:6][CH3:7]";

// Same reaction, different atom order and map numbering.
const char *kEsterShuffled =
    "[CH3:17][CH2:16][OH:15].[OH:14][C:12](=[O:13])[CH3:11]>>[CH3:17][CH2:16][O:15][C:12](=[O:13])[CH3:11]";

data::ReactionRecord reaction(const std::string &smiles, int klass = 2, const std::string &id = "r") {
  return data::parse_reaction(id, klass, smiles);
}

/// Independent center oracle: every (map, map-or-0, order) bond triple and
/// per-atom (charge, H) pair from both sides, then a plain set difference.
std::set<int> oracle_center(const data::ReactionRecord &r) {
  std::set<int> product_maps;
  for (const auto &a: r.product.atoms())
    product_maps.insert(a.atom_map);
  auto kept = [&](int m) { return product_maps.count(m) ? m : 0; };

  using Triple = std::tuple<int, int, int>;
  std::multiset<Triple> before, after;
  std::map<int, std::pair<int, int>> state_before, state_after;
  for (const auto &mol: r.reactants) {
    for (const auto &b: mol.bonds()) {
      const int x = kept(mol.atom(b.begin).atom_map), y = kept(mol.atom(b.end).atom_map);
      before.insert({ x, y, static_cast<int>(b.order) });
      before.insert({ y, x, static_cast<int>(b.order) });
    }
    for (int i = 0; i < mol.num_atoms(); ++i)
      state_before[kept(mol.atom(i).atom_map)] = { mol.atom(i).charge, mol.total_h(i) };
  }
  for (const auto &b: r.product.bonds()) {
    const int x = r.product.atom(b.begin).atom_map, y = r.product.atom(b.end).atom_map;
    after.insert({ x, y, static_cast<int>(b.order) });
    after.insert({ y, x, static_cast<int>(b.order) });
  }
  for (int i = 0; i < r.product.num_atoms(); ++i)
    state_after[r.product.atom(i).atom_map] = { r.product.atom(i).charge, r.product.total_h(i) };

  std::set<int> center;
  for (const int m: product_maps) {
    std::multiset<Triple> nb_before, nb_after;
    for (const auto &t: before)
      if (std::get<0>(t) == m)
        nb_before.insert(t);
    for (const auto &t: after)
      if (std::get<0>(t) == m)
        nb_after.insert(t);
    if (nb_before != nb_after || state_before[m] != state_after[m])
      center.insert(m);
  }
  return center;
}

TEST_CASE("esterification center") {
  const auto r = reaction(kEster);
  const ReactionCenter c = find_reaction_center(r);
  CHECK(c.changed_maps == std::vector<int> { 2, 5 });
  CHECK((c.reasons.at(2) & kBondAdded));
  CHECK((c.reasons.at(2) & kBondRemoved));
  CHECK((c.reasons.at(5) & kHydrogenChanged));
  // The acid hydroxyl O is the fourth reactant atom.
  CHECK(c.leaving_attachments == std::vector<int> { 3 });

  const auto oracle = oracle_center(r);
  CHECK(std::set<int>(c.changed_maps.begin(), c.changed_maps.end()) == oracle);
}

TEST_CASE("center matches the diff oracle on the synthetic corpus") {
  const auto loaded = data::load_reactions_from_string(
      testing::synthetic_tsv(testing::synthetic_reactions(200, 3)));
  REQUIRE(loaded.records.size() == 200);
  for (const auto &r: loaded.records) {
    CAPTURE(r.raw_text);
    const auto c = find_reaction_center(r);
    CHECK(std::set<int>(c.changed_maps.begin(), c.changed_maps.end()) == oracle_center(r));
  }
}

TEST_CASE("identity reaction has an empty center") {
  const auto r = reaction("[CH3:1][CH2:2][OH:3]>>[CH3:1][CH2:2][OH:3]");
  CHECK(find_reaction_center(r).empty());
  CHECK_THROWS_AS(extract_template(r), ExtractionError);
}

TEST_CASE("mapping errors") {
  CHECK_THROWS_AS(find_reaction_center(reaction("[CH3:1][OH:2]>>[CH3:1][O:2][CH3:7]")), MappingError);
  CHECK_THROWS_AS(find_reaction_center(reaction("[CH3:1][OH:2]>>[CH3:1][O:2]C")), MappingError);
  CHECK_THROWS_AS(find_reaction_center(reaction("[CH3:1][OH:1]>>[CH3:1]")), MappingError);
}

TEST_CASE("esterification template structure") {
  const auto r = reaction(kEster);
  const RetroTemplate t = extract_template(r);
  CHECK(t.klass == 2);

  // Product core: CH3, carbonyl C, =O, ester O, CH2.
  const chem::Pattern &p = t.product_core;
  REQUIRE(p.num_nodes() == 5);
  REQUIRE(p.num_edges() == 4);
  int carbonyl = -1;
  for (int i = 0; i < p.num_nodes(); ++i) {
    if (p.node(i).element == 6 && p.node(i).h_count == 0)
      carbonyl = i;
  }
  REQUIRE(carbonyl >= 0);
  std::multiset<std::pair<int, chem::BondPredicate>> around;
  for (const auto &nb: p.neighbors(carbonyl))
    around.insert({ *p.node(nb.atom).element, p.edge(nb.bond).order });
  CHECK(around.count({ 8, chem::BondPredicate::kDouble }) == 1);
  CHECK(around.count({ 8, chem::BondPredicate::kSingle }) == 1);
  CHECK(around.count({ 6, chem::BondPredicate::kSingle }) == 1);

  // Reactant core: acid fragment with the unlabelled OH, alcohol fragment.
  const chem::Pattern &q = t.reactant_core;
  CHECK(q.components().size() == 2);
  int unlabelled = 0;
  for (const auto &n: q.nodes()) {
    if (n.label == 0) {
      ++unlabelled;
      CHECK(n.element == 8);
      CHECK(n.h_count == 1);
    }
  }
  CHECK(unlabelled == 1);

  CHECK(validate_template(t, r));
}

TEST_CASE("template text is canonical and round-trips") {
  const RetroTemplate a = extract_template(reaction(kEster));
  const RetroTemplate b = extract_template(reaction(kEsterShuffled));
  CHECK(a.text == b.text);

  const RetroTemplate back = parse_template(a.text, 2);
  CHECK(chem::write_pattern(back.product_core) + ">>" + chem::write_pattern(back.reactant_core) == a.text);
  CHECK(canonical_template_text(back.product_core, back.reactant_core) == a.text);

  CHECK_THROWS(parse_template("[C;H3:1]", 1));
  CHECK_THROWS(parse_template("[C:1]>>[C:2]", 1));
  CHECK_THROWS(parse_template("[C:1]-[C]>>[C:1]", 1));
}

TEST_CASE("corrupted template fails validation") {
  const auto r = reaction(kEster);
  RetroTemplate t = extract_template(r);
  for (int i = 0; i < t.product_core.num_nodes(); ++i) {
    if (t.product_core.node(i).element == 6 && t.product_core.node(i).h_count == 0)
      t.product_core.node(i).element = 7;
  }
  CHECK_FALSE(validate_template(t, r));
}

TEST_CASE("leaving groups beyond one bond are not captured") {
  const auto r = reaction(
      "[CH3:1][CH2:2][NH:3]C(=O)OC(C)(C)C>>[CH3:1][CH2:2][NH2:3]", 6);
  const RetroTemplate t = extract_template(r);
  int unlabelled = 0;
  for (const auto &n: t.reactant_core.nodes()) {
    if (n.label == 0) {
      ++unlabelled;
      CHECK(n.element == 6);
      CHECK_FALSE(n.h_count.has_value());
    }
  }
  CHECK(unlabelled == 1);
  CHECK(t.reactant_core.num_nodes() == 3);
  CHECK_FALSE(validate_template(t, r));
}

TEST_CASE("rulebase counting and dedup") {
  CHECK(build_rulebase({}).rulebase.empty());

  const std::vector<data::ReactionRecord> twice = {
    reaction(kEster, 2, "a"), reaction(kEsterShuffled, 2, "b") };
  const BuildResult res = build_rulebase(twice);
  REQUIRE(res.rulebase.size() == 1);
  const Rule &rule = res.rulebase.rules().begin()->second;
  CHECK(rule.total_count == 2);
  CHECK(rule.count_for(2) == 2);
  CHECK(rule.provenance_ids == std::vector<std::string> { "a", "b" });
  CHECK(res.stats.valid == 2);
  CHECK(res.stats.coverage() == doctest::Approx(1.0));

  const auto other_class = build_rulebase({ reaction(kEster, 9, "c") });
  RuleBase merged = res.rulebase;
  merged.merge(other_class.rulebase);
  CHECK(merged.size() == 1);
  CHECK(merged.rules().begin()->second.count_for(9) == 1);
  CHECK(merged.rules().begin()->second.total_count == 3);
}

TEST_CASE("rulebase over the synthetic corpus") {
  const auto loaded = data::load_reactions_from_string(
      testing::synthetic_tsv(testing::synthetic_reactions(300, 5)));
  const auto &records = loaded.records;
  const BuildResult one = build_rulebase(records, 1);
  const BuildResult four = build_rulebase(records, 4);
  CHECK(one.rulebase.to_jsonl() == four.rulebase.to_jsonl());
  CHECK(one.stats.valid > 0);
  CHECK(one.stats.valid + one.stats.failures.size() > 0);

  // Doubling the input doubles every count and keeps the keys.
  std::vector<data::ReactionRecord> doubled = records;
  doubled.insert(doubled.end(), records.begin(), records.end());
  const BuildResult two = build_rulebase(doubled, 2);
  REQUIRE(two.rulebase.size() == one.rulebase.size());
  for (const auto &[text, rule]: one.rulebase.rules())
    CHECK(two.rulebase.find(text)->total_count == 2 * rule.total_count);

  // Persisted rules re-validate against their provenance and round-trip.
  std::map<std::string, const data::ReactionRecord *> by_id;
  for (const auto &r: records)
    by_id[r.id] = &r;
  const RuleBase reloaded = RuleBase::from_jsonl(one.rulebase.to_jsonl());
  CHECK(reloaded.to_jsonl() == one.rulebase.to_jsonl());
  for (const auto &[text, rule]: reloaded.rules()) {
    const auto *r = by_id.at(rule.provenance_ids.front());
    CHECK(validate_template(*rule.parsed, *r));
  }

  // Self-application recovers each validated record's reactants.
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (one.record_rule[i].empty())
      continue;
    const auto sets = apply_retro(*one.rulebase.find(one.record_rule[i])->parsed,
                                  chem::strip_atom_maps(records[i].product));
    CHECK(std::binary_search(sets.begin(), sets.end(), data::reactants_smiles(records[i])));
  }
}

}  // namespace
}  // namespace retro::rules
