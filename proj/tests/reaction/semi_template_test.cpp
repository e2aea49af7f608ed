//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "semiretro/chem/canonical.h"
#include "semiretro/chem/match.h"
#include "semiretro/chem/smiles.h"
#include "semiretro/reaction/semi_template.h"
#include "semiretro/reaction/template_library.h"

namespace semiretro::reaction {
namespace {

struct Case {
  Reaction rxn;
  std::vector<Synthon> synthons;
};

Case prepare(const char *smiles) {
  Case c { parse_reaction_smiles(smiles), {} };
  c.synthons = break_into_synthons(c.rxn.product, label_centers(c.rxn));
  return c;
}

// Reactant holding the synthon's first mapped atom.
const chem::MolGraph &reactant_for(const Case &c, const Synthon &s) {
  const int m = s.graph.atom(0).atom_map;
  for (const auto &r: c.rxn.reactants) {
    if (r.find_atom_map(m) >= 0)
      return r;
  }
  throw std::logic_error("no reactant");
}

void expect_round_trip(const char *smiles) {
  const Case c = prepare(smiles);
  ASSERT_FALSE(c.synthons.empty());
  for (const Synthon &s: c.synthons) {
    const chem::MolGraph &r = reactant_for(c, s);
    const SemiTemplate t = extract_semi_template(s, r);
    const chem::MolGraph rebuilt = apply_semi_template(s, t);
    EXPECT_TRUE(chem::is_isomorphic(rebuilt, r))
        << smiles << "\n key " << t.key() << "\n got "
        << chem::write_smiles(rebuilt) << "\n want " << chem::write_smiles(r);
    // Keys survive a parse.
    EXPECT_EQ(SemiTemplate::from_key(t.key()).key(), t.key());
  }
}

TEST(ExtractSemiTemplate, IdentityForUnchangedReactant) {
  const Case c = prepare(
      "[CH3:1][C:2](=[O:3])[Cl:4].[NH2:5][CH3:6]>>[CH3:1][C:2](=[O:3])[NH:5][CH3:6]");
  ASSERT_EQ(c.synthons.size(), 2u);
  const Synthon &amine = c.synthons[1];
  const SemiTemplate t = extract_semi_template(amine, reactant_for(c, amine));
  EXPECT_TRUE(t.is_identity()) << t.key();
  EXPECT_EQ(t.residual_atom_count(), 0);
  EXPECT_EQ(t.key(), "[*:1]|1:a,o1|");

  // Applying the identity restores the hydrogen and clears the flag.
  const chem::MolGraph g = apply_semi_template(amine, t);
  const int n = g.find_atom_map(5);
  EXPECT_EQ(g.hydrogen_count(n), 2);
  EXPECT_FALSE(g.atom(n).attachment);
  EXPECT_EQ(g.atom(n).open_valence, 0);
}

TEST(ExtractSemiTemplate, HalogenResidual) {
  const Case d = prepare("[CH3:1][CH2:2]Br.[OH2:3]>>[CH3:1][CH2:2][OH:3]");
  ASSERT_EQ(d.synthons.size(), 2u);
  const Synthon &alkyl = d.synthons[0];
  const SemiTemplate t = extract_semi_template(alkyl, reactant_for(d, alkyl));
  EXPECT_EQ(t.residual_atom_count(), 1);
  EXPECT_EQ(t.residual_smiles(), "Br(*)");
  ASSERT_EQ(t.pattern().size(), 1u);
  EXPECT_EQ(t.pattern()[0].element, 0);
  EXPECT_TRUE(t.pattern()[0].attachment);
  EXPECT_EQ(t.key(), "[*:1]Br|1:a,o1|");
}

TEST(ApplySemiTemplate, ChargeEditWithoutResidual) {
  const Case c = prepare("[CH3:1][N-:2][CH3:3]>>[CH3:1][NH:2][CH3:3]");
  ASSERT_EQ(c.synthons.size(), 1u);
  const SemiTemplate t = extract_semi_template(c.synthons[0], c.rxn.reactants[0]);
  EXPECT_EQ(t.residual_atom_count(), 0);
  EXPECT_EQ(t.pattern()[0].charge_delta, -1);
  const chem::MolGraph g = apply_semi_template(c.synthons[0], t);
  EXPECT_EQ(g.num_atoms(), 3);
  EXPECT_EQ(g.atom(g.find_atom_map(2)).formal_charge, -1);
  EXPECT_EQ(g.hydrogen_count(g.find_atom_map(2)), 0);
}

TEST(ApplySemiTemplate, GeneralizesAcrossSynthons) {
  // Template mined on an acetyl chloride applies to a benzoyl synthon.
  const Case c = prepare(
      "[CH3:1][C:2](=[O:3])[Cl:4].[NH2:5][CH3:6]>>[CH3:1][C:2](=[O:3])[NH:5][CH3:6]");
  const SemiTemplate acyl = extract_semi_template(c.synthons[0], reactant_for(c, c.synthons[0]));
  EXPECT_EQ(acyl.key(), "[*:1]Cl|1:a,o1|");
  chem::SmilesParseOptions opt;
  opt.dummies_as_open_valence = true;
  const chem::MolGraph benzoyl = chem::parse_smiles("*C(=O)c1ccccc1", opt);
  const chem::MolGraph g = apply_semi_template(benzoyl, acyl);
  EXPECT_EQ(chem::molecule_key(g), chem::molecule_key(chem::parse_smiles("ClC(=O)c1ccccc1")));
}

TEST(ApplySemiTemplate, MismatchAndInfeasible) {
  const SemiTemplate one = SemiTemplate::from_key("[*:1]Cl|1:a,o1|");
  chem::SmilesParseOptions opt;
  opt.dummies_as_open_valence = true;
  // Two attachment atoms against one anchor.
  const chem::MolGraph two = chem::parse_smiles("*CC*", opt);
  try {
    apply_semi_template(two, one);
    FAIL();
  } catch (const TemplateError &e) {
    EXPECT_EQ(e.cause(), TemplateFailure::kPatternMismatch);
  }
  // Double-bond residual on a single open valence.
  const SemiTemplate dbl = SemiTemplate::from_key("O=[C:1]|1:a,o1|");
  const chem::MolGraph methyl = chem::parse_smiles("*C(C)(C)C", opt);
  try {
    apply_semi_template(methyl, dbl);
    FAIL();
  } catch (const TemplateError &e) {
    EXPECT_EQ(e.cause(), TemplateFailure::kInfeasible);
  }
}

TEST(ApplySemiTemplate, DeterministicTieBreak) {
  // Both ring-closure endpoints are symmetric; either choice must give the
  // same molecule and repeated application the same atom order.
  const Case c = prepare(
      "[CH:1]1=[CH:2][CH2:3][CH2:4][CH2:5][CH2:6]1>>[CH2:1]1[CH2:2][CH2:3][CH2:4][CH2:5][CH2:6]1");
  ASSERT_EQ(c.synthons.size(), 1u);
  const SemiTemplate t = extract_semi_template(c.synthons[0], c.rxn.reactants[0]);
  EXPECT_EQ(t.bond_edits().size(), 1u);
  const chem::MolGraph a = apply_semi_template(c.synthons[0], t);
  const chem::MolGraph b = apply_semi_template(c.synthons[0], t);
  EXPECT_EQ(chem::write_smiles(a), chem::write_smiles(b));
  EXPECT_TRUE(chem::is_isomorphic(a, c.rxn.reactants[0]));
}

TEST(SemiTemplate, KeyParsing) {
  EXPECT_THROW(SemiTemplate::from_key("Cl[*:1]"), TemplateError);
  EXPECT_THROW(SemiTemplate::from_key("Cl[*:2]|1:a|"), TemplateError);
  EXPECT_THROW(SemiTemplate::from_key("Cl[*:1]|1:z|"), TemplateError);
  const SemiTemplate t = SemiTemplate::from_key("[C:1].[C:2]|1:a,o1;2:a,o1|1-2:2");
  ASSERT_EQ(t.bond_edits().size(), 1u);
  EXPECT_EQ(t.bond_edits()[0].order, chem::BondOrder::kDouble);
  EXPECT_EQ(t.pattern()[1].open_valence, 1);
}

class RoundTripCase: public ::testing::TestWithParam<const char *> { };

TEST_P(RoundTripCase, ExtractThenApply) {
  expect_round_trip(GetParam());
}

INSTANTIATE_TEST_SUITE_P(
    Reactions, RoundTripCase,
    ::testing::Values(
        // Amide coupling.
        "[CH3:1][C:2](=[O:3])[Cl:4].[NH2:5][CH3:6]>>[CH3:1][C:2](=[O:3])[NH:5][CH3:6]",
        // Boc deprotection.
        "CC(C)(C)OC(=O)[NH:1][CH2:2][CH3:3]>>[NH2:1][CH2:2][CH3:3]",
        // Nitro reduction on an arene.
        "[O-][N+:1](=O)[c:2]1[cH:3][cH:4][cH:5][cH:6][cH:7]1>>[NH2:1][c:2]1[cH:3][cH:4][cH:5][cH:6][cH:7]1",
        // Ester hydrolysis.
        "C[O:1][C:2](=[O:3])[CH3:4]>>[OH:1][C:2](=[O:3])[CH3:4]",
        // Suzuki coupling.
        "Br[c:1]1[cH:2][cH:3][cH:4][cH:5][cH:6]1.OB(O)[c:7]1[cH:8][cH:9][cH:10][cH:11][cH:12]1>>[c:1]1([c:7]2[cH:8][cH:9][cH:10][cH:11][cH:12]2)[cH:2][cH:3][cH:4][cH:5][cH:6]1",
        // Reductive amination: residual double bond differs from the cut.
        "[CH3:1][CH:2]=O.[NH2:3][CH3:4]>>[CH3:1][CH2:2][NH:3][CH3:4]",
        // Ring double-bond hydrogenation without disconnection.
        "[CH:1]1=[CH:2][CH2:3][CH2:4][CH2:5][CH2:6]1>>[CH2:1]1[CH2:2][CH2:3][CH2:4][CH2:5][CH2:6]1",
        // Ring closure by double alkylation (two bond centers, one reactant
        // each side).
        "Br[CH2:1][CH2:2][CH2:3][CH2:4]Br.[NH2:5][CH3:6]>>[CH2:1]1[CH2:2][CH2:3][CH2:4][N:5]1[CH3:6]",
        // Sulfonamide with a charged residual-free partner.
        "[CH3:1][S:2](=[O:3])(=[O:4])Cl.[NH2:5][c:6]1[cH:7][cH:8][cH:9][cH:10][cH:11]1>>[CH3:1][S:2](=[O:3])(=[O:4])[NH:5][c:6]1[cH:7][cH:8][cH:9][cH:10][cH:11]1"));

TEST(DecomposeReaction, SharedReactantIsReported) {
  // Ketone reduction: the C=O order change splits O off the same reactant.
  const Reaction r = parse_reaction_smiles(
      "[CH3:1][C:2](=[O:3])[CH3:4]>>[CH3:1][CH:2]([OH:3])[CH3:4]");
  const DecomposedReaction d = decompose_reaction(r);
  ASSERT_EQ(d.synthons.size(), 2u);
  for (const auto &t: d.templates)
    EXPECT_EQ(t.failure, TemplateFailure::kSharedReactant);
  EXPECT_FALSE(d.fully_extracted());
}

TEST(DecomposeReaction, RebuildsReactantSet) {
  const Reaction r = parse_reaction_smiles(
      "[CH3:1][C:2](=[O:3])[Cl:4].[NH2:5][CH3:6]>>[CH3:1][C:2](=[O:3])[NH:5][CH3:6]");
  const DecomposedReaction d = decompose_reaction(r);
  ASSERT_TRUE(d.fully_extracted());
  std::multiset<std::string> want, got;
  for (const auto &m: r.reactants)
    want.insert(chem::molecule_key(m));
  for (std::size_t i = 0; i < d.synthons.size(); ++i)
    got.insert(chem::molecule_key(apply_semi_template(d.synthons[i], *d.templates[i].tpl)));
  EXPECT_EQ(got, want);
}

}  // namespace
}  // namespace semiretro::reaction
