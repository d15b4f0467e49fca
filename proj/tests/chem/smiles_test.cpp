//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <random>

#include <doctest.h>

#include "oracles.h"
#include "retro/chem/canon.h"
#include "retro/chem/smiles.h"

namespace retro::chem {
namespace {

const std::vector<std::string> kMolecules = {
  "CCO",
  "C",
  "[Na+].[Cl-]",
  "c1ccccc1",
  "CC(=O)Oc1ccccc1C(=O)O",
  "CN1CCC[C@H]1c1cccnc1",
  "O=C(N[C@@H](Cc1ccccc1)C(=O)O)OCc1ccccc1",
  "c1ccc2[nH]ccc2c1",
  "C/C=C/C(=O)O",
  "C[N+](C)(C)C",
  "O=[N+]([O-])c1ccc(Br)cc1",
  "[13CH3]C#N",
  "C1CC2CCC1CC2",
  "C12C3C4C1C5C2C3C45",
  "CC(C)(C)OC(=O)N1CCN(CC1)c1ncccn1",
  "FC(F)(F)c1cc(-c2ccccc2)on1",
  "C%10CCCCC%10",
  "CS(=O)(=O)Cl",
  "[CH3:1][OH:2]",
  "B(O)(O)c1ccsc1",
  "[Si](C)(C)(C)OCC",
  "N#Cc1ccc(I)cc1.O",
};

std::vector<int> random_perm(int n, std::mt19937 &rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

TEST_CASE("parse simple chain") {
  const MolGraph mol = parse_smiles("CCO");
  REQUIRE(mol.num_atoms() == 3);
  REQUIRE(mol.num_bonds() == 2);
  CHECK(mol.bond_between(0, 1).has_value());
  CHECK(mol.bond_between(1, 2).has_value());
  CHECK(mol.atom(2).element == 8);
  for (const Atom &a: mol.atoms())
    CHECK(a.charge == 0);
  CHECK(mol.total_h(0) == 3);
  CHECK(mol.total_h(1) == 2);
  CHECK(mol.total_h(2) == 1);
}

TEST_CASE("bracket atoms carry maps and hydrogens") {
  const MolGraph mol = parse_smiles("[CH3:1][OH:2]");
  REQUIRE(mol.num_atoms() == 2);
  CHECK(mol.atom(0).atom_map == 1);
  CHECK(mol.atom(1).atom_map == 2);
  CHECK(mol.atom(0).explicit_h == 3);
  CHECK(mol.atom(1).explicit_h == 1);

  const MolGraph ion = parse_smiles("[13CH2-2]");
  CHECK(ion.atom(0).isotope == 13);
  CHECK(ion.atom(0).charge == -2);
  CHECK(ion.atom(0).explicit_h == 2);

  const MolGraph plus = parse_smiles("[NH4+]");
  CHECK(plus.atom(0).charge == 1);
  CHECK(parse_smiles("[Fe++]").atom(0).charge == 2);
  CHECK(parse_smiles("[C@@H](F)(Cl)Br").atom(0).chirality == Chirality::kClockwise);
}

TEST_CASE("aromatic ring and ring closure errors") {
  const MolGraph benzene = parse_smiles("c1ccccc1");
  REQUIRE(benzene.num_atoms() == 6);
  CHECK(benzene.num_bonds() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(benzene.atom(i).aromatic);
    CHECK(benzene.total_h(i) == 1);
  }
  CHECK_THROWS_AS(parse_smiles("c1ccccc"), SyntaxError);
}

TEST_CASE("malformed input raises SyntaxError") {
  for (const char *bad: { "C(C", "CC)", "C[CH3", "[Xx]", "Q", "C1CC", "C=", "=C", "C(=)C",
                          "[C+9]", "C..C", "C()C", "[CH3:]", "C11", "C12CC12", "%1C" }) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_smiles(bad), SyntaxError);
  }
  CHECK_THROWS_AS(parse_smiles(""), SyntaxError);
}

TEST_CASE("pentavalent carbon follows the valence policy") {
  CHECK_THROWS_AS(parse_smiles("C(C)(C)(C)(C)C"), ValenceError);
  SmilesOptions lenient;
  lenient.strict_valence = false;
  const MolGraph mol = parse_smiles("C(C)(C)(C)(C)C", lenient);
  CHECK(mol.num_atoms() == 6);
  CHECK(mol.total_h(0) == 0);
  // Hypervalent states listed for N, P and S are fine.
  CHECK_NOTHROW(parse_smiles("CS(=O)(=O)C"));
  CHECK_NOTHROW(parse_smiles("CN(=O)=O"));
  CHECK_THROWS_AS(parse_smiles("FO(F)F"), ValenceError);
}

TEST_CASE("implicit hydrogens on aromatic atoms") {
  const MolGraph pyridine = parse_smiles("c1ccncc1");
  CHECK(pyridine.total_h(3) == 0);
  const MolGraph furan = parse_smiles("c1ccoc1");
  CHECK(furan.total_h(3) == 0);
  const MolGraph mpyrrole = parse_smiles("Cn1cccc1");
  CHECK(mpyrrole.total_h(1) == 0);
  const MolGraph pyrrole = parse_smiles("c1cc[nH]c1");
  CHECK(pyrrole.total_h(3) == 1);
}

TEST_CASE("write single atoms and components") {
  CHECK(write_smiles(parse_smiles("C")) == "C");
  const std::string two = write_smiles(parse_smiles("CC.O"));
  CHECK(std::count(two.begin(), two.end(), '.') == 1);
  CHECK(write_smiles(parse_smiles("[NH4+]")) == "[NH4+]");
  CHECK(write_smiles(parse_smiles("[CH4]")) == "C");
  CHECK(write_smiles(parse_smiles("c1ccccc1-c1ccccc1")) == "c1ccccc1-c1ccccc1");
}

TEST_CASE("parse-write-parse is isomorphic under any traversal order") {
  std::mt19937 rng(7);
  for (const auto &smi: kMolecules) {
    CAPTURE(smi);
    const MolGraph mol = parse_smiles(smi);
    const MolGraph again = parse_smiles(write_smiles(mol));
    CHECK(testing::isomorphic(mol, again));
    for (int trial = 0; trial < 5; ++trial) {
      const auto ranks = random_perm(mol.num_atoms(), rng);
      const std::string text = write_smiles(mol, ranks);
      CAPTURE(text);
      CHECK(testing::isomorphic(mol, parse_smiles(text)));
    }
  }
}

TEST_CASE("stereo marks survive canonical writing") {
  const std::string can = canonical_smiles(parse_smiles("C/C=C/C"));
  CHECK(std::count(can.begin(), can.end(), '/') + std::count(can.begin(), can.end(), '\\') == 2);
  CHECK(canonical_smiles(parse_smiles("C[C@H](N)O")).find('@') != std::string::npos);
}

TEST_CASE("strip_atom_maps") {
  const MolGraph stripped = strip_atom_maps(parse_smiles("[CH3:1]O"));
  CHECK(testing::isomorphic(stripped, parse_smiles("CO")));
  CHECK(canonical_smiles(stripped) == canonical_smiles(parse_smiles("CO")));

  const MolGraph plain = parse_smiles("CCN");
  CHECK(strip_atom_maps(plain) == plain);

  const MolGraph mapped = parse_smiles("[CH3:4][C:2](=[O:1])[O-:3]");
  const MolGraph once = strip_atom_maps(mapped);
  CHECK(strip_atom_maps(once) == once);
  CHECK(once.num_atoms() == mapped.num_atoms());
  CHECK(once.num_bonds() == mapped.num_bonds());
  for (int i = 0; i < mapped.num_atoms(); ++i) {
    CHECK(once.atom(i).charge == mapped.atom(i).charge);
    CHECK(once.atom(i).atom_map == 0);
  }
  for (int b = 0; b < mapped.num_bonds(); ++b)
    CHECK(once.bond(b).order == mapped.bond(b).order);
}

}  // namespace
}  // namespace retro::chem
