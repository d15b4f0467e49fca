//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include <doctest.h>

#include "oracles.h"
#include "retro/chem/canon.h"
#include "retro/chem/smiles.h"

namespace retro::chem {
namespace {

const std::vector<std::string> kMolecules = {
  "CCO",
  "OCC",
  "CC(C)O",
  "c1ccccc1",
  "CC(C)(C)C(C)(C)C",
  "C1CCC2CCCCC2C1",
  "C12C3C4C1C5C2C3C45",
  "c1ccc2cc3ccccc3cc2c1",
  "CC(=O)Nc1ccc(O)cc1",
  "O=C(O)c1ccccc1.CCO",
  "CC.CC.O",
  "C[C@H](N)C(=O)O",
  "C/C=C\\C",
  "CN(C)C(=O)c1ccc(-c2ccncc2)cc1",
  "C1CC1C1CC1",
  "C1CCCCC1.C1CCCCC1",
};

LabeledGraph as_labeled(const MolGraph &mol) {
  LabeledGraph g;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    g.node_labels.push_back(mol.atom(i).element * 100 + mol.degree(i) * 10 + mol.total_h(i));
    g.adjacency.emplace_back();
    for (const Neighbor &nb: mol.neighbors(i))
      g.adjacency.back().push_back({ nb.atom, static_cast<int>(mol.bond(nb.bond).order) });
  }
  return g;
}

TEST_CASE("canonical SMILES is independent of input spelling") {
  CHECK(canonical_smiles(parse_smiles("OCC")) == canonical_smiles(parse_smiles("CCO")));
  CHECK(canonical_smiles(parse_smiles("C(O)C")) == canonical_smiles(parse_smiles("CCO")));
  CHECK(canonical_smiles(parse_smiles("c1ccccc1O")) == canonical_smiles(parse_smiles("Oc1ccccc1")));
  CHECK(canonical_smiles(parse_smiles("C1=CC=CN1")) != canonical_smiles(parse_smiles("c1cc[nH]c1")));
}

TEST_CASE("canonical ranks are invariant under atom permutation") {
  std::mt19937 rng(11);
  for (const auto &smi: kMolecules) {
    CAPTURE(smi);
    const MolGraph mol = parse_smiles(smi);
    const auto base = canonical_ranks(mol);
    const std::string base_text = canonical_smiles(mol);
    // Ranks form a permutation.
    std::vector<int> sorted = base;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> iota(mol.num_atoms());
    std::iota(iota.begin(), iota.end(), 0);
    CHECK(sorted == iota);

    for (int trial = 0; trial < 10; ++trial) {
      std::vector<int> perm(mol.num_atoms());
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      const MolGraph shuffled = permute_atoms(mol, perm);
      CHECK(canonical_smiles(shuffled) == base_text);
    }
  }
}

TEST_CASE("canonical SMILES is a fixed point under re-parse") {
  for (const auto &smi: kMolecules) {
    CAPTURE(smi);
    const std::string once = canonical_smiles(parse_smiles(smi));
    CHECK(canonical_smiles(parse_smiles(once)) == once);
  }
}

TEST_CASE("benzene atoms tie before tie-breaking") {
  const MolGraph benzene = parse_smiles("c1ccccc1");
  const LabeledGraph g = as_labeled(benzene);
  std::vector<int> ranks(6, 0);
  refine_ranks(g, ranks);
  CHECK(std::set<int>(ranks.begin(), ranks.end()).size() == 1);
}

TEST_CASE("symmetric methyls of isopropanol get adjacent ranks") {
  const MolGraph mol = parse_smiles("CC(C)O");
  // Oracle: the orbit of atom 0 under brute-force automorphisms.
  std::set<int> orbit;
  for (const auto &perm: testing::automorphisms(mol))
    orbit.insert(perm[0]);
  REQUIRE(orbit == std::set<int> { 0, 2 });

  const auto ranks = canonical_ranks(mol);
  CHECK(std::abs(ranks[0] - ranks[2]) == 1);
}

TEST_CASE("multi-component output is sorted by component string") {
  const std::string can = canonical_smiles(parse_smiles("OCC.N.c1ccccc1"));
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = can.find('.', start);
    parts.push_back(can.substr(start, dot - start));
    if (dot == std::string::npos)
      break;
    start = dot + 1;
  }
  REQUIRE(parts.size() == 3);
  CHECK(std::is_sorted(parts.begin(), parts.end()));
  CHECK(canonical_components(parse_smiles("OCC.N.c1ccccc1")) == parts);
}

TEST_CASE("atom maps are stripped unless requested") {
  const MolGraph mol = parse_smiles("[CH3:2][CH2:1][OH:3]");
  CHECK(canonical_smiles(mol) == canonical_smiles(parse_smiles("CCO")));
  CHECK(canonical_smiles(mol, true).find(":1") != std::string::npos);
}

}  // namespace
}  // namespace retro::chem
