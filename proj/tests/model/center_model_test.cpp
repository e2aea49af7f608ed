//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "semiretro/chem/canonical.h"
#include "semiretro/chem/features.h"
#include "semiretro/chem/smiles.h"
#include "semiretro/model/center_model.h"
#include "semiretro/pipeline/train.h"
#include "../common/corpus.h"
#include "../common/gradcheck.h"

namespace semiretro::model {
namespace {

using tensor::Matrix;
using tensor::Tensor;

CenterModelConfig small_config() {
  CenterModelConfig c;
  c.gnn.width = 8;
  c.gnn.layers = 2;
  c.gnn.heads = 2;
  c.hidden = 8;
  return c;
}

TEST(CenterModel, RepresentationWidths) {
  const CenterModel m(small_config(), 1);
  const GraphBatch g = make_batch(featurize(chem::parse_smiles("CC(=O)O")));
  const auto rep = m.representations(g, m.gnn().forward(g));
  const int r = small_config().gnn.readout_width();
  EXPECT_EQ(rep.atoms.cols(), 2 * r);
  EXPECT_EQ(rep.atoms.rows(), 4);
  EXPECT_EQ(rep.edges.cols(), chem::kBondFeatureWidth + 3 * r);
  EXPECT_EQ(rep.edges.rows(), 6);
}

TEST(CenterModel, SingleAtomRepresentationRepeatsItself) {
  const CenterModel m(small_config(), 1);
  const GraphBatch g = make_batch(featurize(chem::parse_smiles("O")));
  const auto rep = m.representations(g, m.gnn().forward(g)).atoms.value();
  const int r = small_config().gnn.readout_width();
  EXPECT_EQ((rep.leftCols(r) - rep.rightCols(r)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(CenterModel, MoleculeMeanMatchesBruteForce) {
  const CenterModel m(small_config(), 2);
  const GraphFeatures a = featurize(chem::parse_smiles("c1ccccc1O"));
  const GraphFeatures b = featurize(chem::parse_smiles("CCN"));
  const GraphFeatures c = featurize(chem::parse_smiles("Cl"));
  const GraphFeatures *all[] = { &a, &b, &c };
  const GraphBatch g = make_batch(all);
  const Matrix h = m.gnn().forward(g).value();
  const auto rep = m.representations(g, Tensor(h));
  const int r = small_config().gnn.readout_width();
  for (int gi = 0; gi < g.num_graphs; ++gi) {
    Matrix mean = Matrix::Zero(1, r);
    for (int i = g.atom_offset[gi]; i < g.atom_offset[gi + 1]; ++i)
      mean += h.row(i);
    mean /= g.atom_offset[gi + 1] - g.atom_offset[gi];
    for (int i = g.atom_offset[gi]; i < g.atom_offset[gi + 1]; ++i)
      EXPECT_LT((rep.atoms.value().block(i, r, 1, r) - mean).cwiseAbs().maxCoeff(), 1e-12);
  }
  for (int e = 0; e < g.num_edges(); ++e) {
    const Matrix &row = rep.edges.value();
    const int k = chem::kBondFeatureWidth;
    EXPECT_EQ((row.block(e, 0, 1, k) - g.edges.row(e)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((row.block(e, k, 1, r) - h.row(g.src[e])).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((row.block(e, k + r, 1, r) - h.row(g.dst[e])).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(CenterModel, ZeroHeadsGiveHalfEverywhereAndLn2Loss) {
  CenterModel m(small_config(), 3);
  semiretro::testing::zero_params(m.params(), "ci.atom_head.2");
  semiretro::testing::zero_params(m.params(), "ci.bond_head.2");
  const chem::MolGraph mol = chem::parse_smiles("CC(=O)Nc1ccccc1");
  const CenterPrediction p = m.predict(mol);
  for (double v: p.atom_probs)
    EXPECT_DOUBLE_EQ(v, 0.5);
  for (double v: p.bond_probs)
    EXPECT_DOUBLE_EQ(v, 0.5);
  const GraphFeatures f1 = featurize(mol);
  const GraphFeatures f2 = featurize(chem::parse_smiles("OCCO"));
  const GraphFeatures *both[] = { &f1, &f2 };
  const reaction::CenterLabel labels[] = { reaction::CenterLabel::from_center({ 1, 3 }),
                                           reaction::CenterLabel::from_center({ 0, -1 }) };
  const double expected = (f1.num_atoms() + f1.num_bonds() + f2.num_atoms() + f2.num_bonds())
                          * std::numbers::ln2;
  EXPECT_NEAR(m.loss(make_batch(both), labels).item(), expected, 1e-12);
}

TEST(CenterModel, BondLogitIgnoresBondDirection) {
  const CenterModel m(small_config(), 4);
  const chem::MolGraph fwd = chem::parse_smiles("CC(=O)OCC");
  chem::MolGraph rev;
  for (const chem::Atom &a: fwd.atoms())
    rev.add_atom(a);
  for (const chem::Bond &b: fwd.bonds())
    rev.add_bond(b.end, b.begin, b.order);
  const auto a = m.predict(fwd).bond_probs;
  const auto b = m.predict(rev).bond_probs;
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_NEAR(a[i], b[i], 1e-14);
}

TEST(CenterModel, TargetsMarkLabeledCenters) {
  const GraphFeatures f = featurize(chem::parse_smiles("CC(=O)N"));
  const GraphBatch g = make_batch(f);
  reaction::CenterLabel label;
  label.atom_centers = { 3 };
  label.bond_centers = { { 1, 3 } };
  const reaction::CenterLabel labels[] = { label };
  const Matrix at = atom_targets(g, labels);
  const Matrix bt = bond_targets(g, labels);
  EXPECT_EQ(at.sum(), 1.0);
  EXPECT_EQ(at(3, 0), 1.0);
  EXPECT_EQ(bt.sum(), 1.0);
  EXPECT_EQ(bt(2, 0), 1.0);  // bonds in input order: 0-1, 1-2, 1-3
}

TEST(CenterModel, ParameterGradientsMatchFiniteDifferences) {
  CenterModel m(small_config(), 5);
  const GraphFeatures f1 = featurize(chem::parse_smiles("CC(=O)Nc1ccccc1"));
  const GraphFeatures f2 = featurize(chem::parse_smiles("OCC#N"));
  const GraphFeatures *both[] = { &f1, &f2 };
  const GraphBatch g = make_batch(both);
  const reaction::CenterLabel labels[] = { reaction::CenterLabel::from_center({ 1, 3 }),
                                           reaction::CenterLabel::from_center({ 0, -1 }) };
  std::mt19937_64 pick(6);
  const double err = semiretro::testing::param_gradcheck(
      m.params(), [&] { return m.loss(g, labels); }, pick, 4);
  EXPECT_LT(err, 1e-6);
}

// Independent ordering oracle: probability, then atoms before bonds, then
// canonical ranks compared as sorted pairs.
TEST(CenterModel, RankingMatchesSortingOracleAndMonotoneTransforms) {
  std::mt19937_64 rng(7);
  const chem::MolGraph mol = chem::parse_smiles("CC(C)(C)OC(=O)N1CCC(N)CC1");
  chem::CanonicalOptions opts;
  opts.atom_maps = false;
  opts.stereo = false;
  const auto ranks = chem::canonicalize(mol, opts).ranks;
  for (int trial = 0; trial < 20; ++trial) {
    // Coarse values force many ties.
    std::uniform_int_distribution<int> level(0, 3);
    std::vector<double> ap(mol.num_atoms()), bp(mol.num_bonds());
    for (double &v: ap)
      v = level(rng) / 4.0;
    for (double &v: bp)
      v = level(rng) / 4.0;
    const auto ranked = rank_centers(mol, ap, bp);
    ASSERT_EQ(ranked.size(), static_cast<std::size_t>(mol.num_atoms() + mol.num_bonds()));

    struct Row {
      double p;
      int kind;
      int lo, hi;
    };
    std::vector<Row> oracle;
    for (int i = 0; i < mol.num_atoms(); ++i)
      oracle.push_back({ ap[i], 0, ranks[i], -1 });
    for (int b = 0; b < mol.num_bonds(); ++b) {
      const int x = ranks[mol.bond(b).begin], y = ranks[mol.bond(b).end];
      oracle.push_back({ bp[b], 1, std::min(x, y), std::max(x, y) });
    }
    std::sort(oracle.begin(), oracle.end(), [](const Row &a, const Row &b) {
      return std::make_tuple(-a.p, a.kind, a.lo, a.hi) < std::make_tuple(-b.p, b.kind, b.lo, b.hi);
    });
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      const auto &l = ranked[i].label;
      EXPECT_DOUBLE_EQ(ranked[i].prob, oracle[i].p);
      if (oracle[i].kind == 0) {
        ASSERT_EQ(l.atom_centers.size(), 1u);
        EXPECT_EQ(ranks[l.atom_centers[0]], oracle[i].lo);
      } else {
        ASSERT_EQ(l.bond_centers.size(), 1u);
        const int x = ranks[l.bond_centers[0].first], y = ranks[l.bond_centers[0].second];
        EXPECT_EQ(std::min(x, y), oracle[i].lo);
        EXPECT_EQ(std::max(x, y), oracle[i].hi);
      }
    }

    std::vector<double> ap2 = ap, bp2 = bp;
    for (double &v: ap2)
      v = v * v * v;
    for (double &v: bp2)
      v = v * v * v;
    const auto again = rank_centers(mol, ap2, bp2);
    for (std::size_t i = 0; i < ranked.size(); ++i)
      EXPECT_EQ(again[i].label, ranked[i].label);
  }
}

TEST(CenterModel, TopKBoundaries) {
  const CenterModel m(small_config(), 8);
  const chem::MolGraph mol = chem::parse_smiles("CC(=O)OCC");
  const CenterPrediction p = m.predict(mol);
  const int all = mol.num_atoms() + mol.num_bonds();
  EXPECT_EQ(m.topk_centers(mol, all + 5).size(), static_cast<std::size_t>(all));
  const auto top1 = m.topk_centers(mol, 1);
  ASSERT_EQ(top1.size(), 1u);
  const double best = std::max(*std::max_element(p.atom_probs.begin(), p.atom_probs.end()),
                               *std::max_element(p.bond_probs.begin(), p.bond_probs.end()));
  EXPECT_DOUBLE_EQ(top1[0].prob, best);
  EXPECT_FALSE(top1[0].synthons.empty());
}

TEST(CenterModel, OverfitsSmallCorpusSlice) {
  const auto &rxns = semiretro::testing::mini_corpus();
  const auto data = semiretro::testing::decomposed_prefix(24);
  const auto examples = pipeline::make_ci_examples(
      data, std::span<const reaction::Reaction>(rxns.data(), data.size()));
  CenterModelConfig cfg;
  cfg.gnn.width = 16;
  cfg.gnn.layers = 3;
  cfg.gnn.heads = 4;
  cfg.hidden = 32;
  CenterModel m(cfg, 9);
  pipeline::TrainOptions opt;
  opt.epochs = 120;
  opt.batch_size = 8;
  opt.max_lr = 3e-3;
  opt.seed = 10;
  const auto report = pipeline::train_center_model(m, examples, opt);
  EXPECT_LT(report.epoch_loss.back(), report.epoch_loss.front());
  const int ks[] = { 1 };
  EXPECT_DOUBLE_EQ(pipeline::center_accuracy(m, examples, ks)[0], 1.0);
}

}  // namespace
}  // namespace semiretro::model
