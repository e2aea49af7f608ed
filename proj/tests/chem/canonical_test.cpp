//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "../common/test_util.h"
#include "semiretro/chem/canonical.h"
#include "semiretro/chem/match.h"
#include "semiretro/chem/smiles.h"

namespace semiretro::chem {
namespace {

using semiretro::testing::random_molecule;
using semiretro::testing::random_permutation;
using semiretro::testing::relabel;

std::set<std::string> all_orderings(const MolGraph &g) {
  std::mt19937 rng(1);
  std::vector<int> p(g.num_atoms());
  std::iota(p.begin(), p.end(), 0);
  std::set<std::string> forms;
  do {
    forms.insert(canonical_smiles(relabel(g, p, rng)));
  } while (std::next_permutation(p.begin(), p.end()));
  return forms;
}

TEST(CanonicalSmiles, SingleAtom) {
  EXPECT_EQ(canonical_smiles(parse_smiles("C")), "C");
}

TEST(CanonicalSmiles, EthanolAllOrderings) {
  const auto forms = all_orderings(parse_smiles("OCC"));
  EXPECT_EQ(forms.size(), 1u);
}

TEST(CanonicalSmiles, ExhaustiveSmallMolecules) {
  for (const char *s: { "C1CC1C", "OC(=O)CN", "c1ccccc1", "CC(C)(C)O",
                        "C1CCC2CC2C1", "FC(F)(F)C#N", "[NH3+]CC([O-])=O",
                        "C1CC1C1CC1" }) {
    const auto forms = all_orderings(parse_smiles(s));
    EXPECT_EQ(forms.size(), 1u) << s << " first=" << *forms.begin();
  }
}

TEST(CanonicalSmiles, ExhaustiveRandomSmall) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const MolGraph g = random_molecule(4 + trial % 4, rng);
    const auto forms = all_orderings(g);
    EXPECT_EQ(forms.size(), 1u) << write_smiles(g);
  }
}

TEST(CanonicalSmiles, SampledPermutationsOfRandomMolecules) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const MolGraph g = random_molecule(8 + trial % 12, rng);
    const std::string ref = canonical_smiles(g);
    for (int k = 0; k < 20; ++k) {
      const MolGraph h = relabel(g, random_permutation(g.num_atoms(), rng), rng);
      ASSERT_EQ(canonical_smiles(h), ref) << write_smiles(g);
    }
  }
}

TEST(CanonicalSmiles, IdempotentAndFaithful) {
  std::mt19937 rng(9);
  for (const char *s: { "C[C@H](N)C(=O)O", "F/C=C\\F", "CC(=O)Nc1ccc(O)cc1",
                        "[CH3:3][C:1](=[O:2])[Cl:4]", "C1CC2CCC1CC2" }) {
    const MolGraph g = parse_smiles(s);
    const std::string c = canonical_smiles(g);
    EXPECT_EQ(canonical_smiles(parse_smiles(c)), c) << s;
    EXPECT_TRUE(is_isomorphic(parse_smiles(c), g, true)) << s << " -> " << c;
    for (int k = 0; k < 10; ++k) {
      const MolGraph h = relabel(g, random_permutation(g.num_atoms(), rng), rng);
      EXPECT_EQ(canonical_smiles(h), c) << s;
    }
  }
}

TEST(CanonicalSmiles, DistinguishesNonIsomorphic) {
  EXPECT_NE(canonical_smiles(parse_smiles("CCO")),
            canonical_smiles(parse_smiles("COC")));
  EXPECT_NE(canonical_smiles(parse_smiles("C[C@H](N)O")),
            canonical_smiles(parse_smiles("C[C@@H](N)O")));
  EXPECT_EQ(molecule_key(parse_smiles("C[C@H](N)O")),
            molecule_key(parse_smiles("C[C@@H](N)O")));
  EXPECT_EQ(molecule_key(parse_smiles("[CH3:1][OH:2]")), "CO");
}

TEST(CanonicalSmiles, RanksAreTotalOrder) {
  const CanonicalForm f = canonicalize(parse_smiles("c1ccccc1C(C)C"));
  std::vector<int> r = f.ranks;
  std::sort(r.begin(), r.end());
  for (int i = 0; i < static_cast<int>(r.size()); ++i)
    EXPECT_EQ(r[i], i);
}

}  // namespace
}  // namespace semiretro::chem
