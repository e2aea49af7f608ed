//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "../common/test_util.h"
#include "semiretro/chem/match.h"
#include "semiretro/chem/smiles.h"

namespace semiretro::chem {
namespace {

// Every injective map from pattern atoms to target atoms that preserves
// labels and bonds, by enumerating index tuples.
std::set<std::vector<int>> brute_force(const MolGraph &p, const MolGraph &t) {
  std::set<std::vector<int>> out;
  const int n = p.num_atoms(), m = t.num_atoms();
  std::vector<int> map(n, 0);
  while (true) {
    std::vector<int> sorted = map;
    std::sort(sorted.begin(), sorted.end());
    bool ok = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    for (int i = 0; ok && i < n; ++i) {
      const Atom &a = p.atom(i);
      const Atom &b = t.atom(map[i]);
      if (a.element != 0
          && (a.element != b.element || a.formal_charge != b.formal_charge
              || a.aromatic != b.aromatic))
        ok = false;
    }
    for (int k = 0; ok && k < p.num_bonds(); ++k) {
      const Bond &pb = p.bond(k);
      const int tb = t.find_bond(map[pb.begin], map[pb.end]);
      if (tb < 0 || t.bond(tb).order != pb.order)
        ok = false;
    }
    if (ok)
      out.insert(map);
    int pos = 0;
    while (pos < n && ++map[pos] == m)
      map[pos++] = 0;
    if (pos == n)
      break;
  }
  return out;
}

MolGraph pattern(const char *s) {
  SmilesParseOptions opt;
  opt.check_valence = false;
  return parse_smiles(s, opt);
}

TEST(SubgraphMatch, WildcardBromide) {
  const auto maps = subgraph_match(pattern("*Br"), parse_smiles("CBr"));
  ASSERT_EQ(maps.size(), 1u);
  EXPECT_EQ(maps[0], (std::vector<int> { 0, 1 }));
}

TEST(SubgraphMatch, EthaneInPropane) {
  EXPECT_EQ(subgraph_match(pattern("CC"), parse_smiles("CCC")).size(), 4u);
}

TEST(SubgraphMatch, NoNitrogenInEthanol) {
  EXPECT_TRUE(subgraph_match(pattern("N"), parse_smiles("CCO")).empty());
}

TEST(SubgraphMatch, BondOrderRespected) {
  EXPECT_TRUE(subgraph_match(pattern("C=O"), parse_smiles("CCO")).empty());
  EXPECT_EQ(subgraph_match(pattern("C=O"), parse_smiles("CC=O")).size(), 1u);
}

TEST(SubgraphMatch, MappingsEmbedPattern) {
  const MolGraph p = pattern("*C(=O)N");
  const MolGraph t = parse_smiles("CC(=O)NCC(=O)NC");
  const auto maps = subgraph_match(p, t);
  ASSERT_FALSE(maps.empty());
  for (const auto &m: maps) {
    for (const Bond &b: p.bonds()) {
      const int tb = t.find_bond(m[b.begin], m[b.end]);
      ASSERT_GE(tb, 0);
      EXPECT_EQ(t.bond(tb).order, b.order);
    }
  }
}

TEST(SubgraphMatch, AgreesWithBruteForce) {
  std::mt19937 rng(3);
  int nonempty = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const MolGraph t = semiretro::testing::random_molecule(4 + trial % 5, rng);
    MolGraph p = semiretro::testing::random_molecule(2 + trial % 3, rng);
    if (trial % 4 == 0)
      p.mutable_atom(0).element = 0;
    const auto got = subgraph_match(p, t);
    const std::set<std::vector<int>> got_set(got.begin(), got.end());
    EXPECT_EQ(got_set.size(), got.size());
    EXPECT_EQ(got_set, brute_force(p, t));
    nonempty += !got.empty();
  }
  EXPECT_GT(nonempty, 10);
}

TEST(IsIsomorphic, LabelsMatter) {
  EXPECT_TRUE(is_isomorphic(parse_smiles("OCC"), parse_smiles("CCO")));
  EXPECT_FALSE(is_isomorphic(parse_smiles("CCO"), parse_smiles("COC")));
  EXPECT_FALSE(is_isomorphic(parse_smiles("CC[O-]"), parse_smiles("CCO")));
  EXPECT_FALSE(is_isomorphic(parse_smiles("[CH3:1]C"), parse_smiles("[CH3:2]C"),
                             true));
  EXPECT_TRUE(is_isomorphic(parse_smiles("[CH3:1]C"), parse_smiles("[CH3:2]C")));
}

}  // namespace
}  // namespace semiretro::chem
