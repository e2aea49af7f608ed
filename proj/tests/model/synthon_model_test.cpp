//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "semiretro/chem/smiles.h"
#include "semiretro/model/synthon_model.h"
#include "semiretro/pipeline/train.h"
#include "../common/corpus.h"
#include "../common/gradcheck.h"

namespace semiretro::model {
namespace {

using tensor::Matrix;
using tensor::Tensor;

SynthonModelConfig small_config(int classes = reaction::TemplateLibrary::kDefaultK + 1) {
  SynthonModelConfig c;
  c.gnn.width = 8;
  c.gnn.layers = 2;
  c.gnn.heads = 2;
  c.hidden = 16;
  c.num_classes = classes;
  c.class_embedding = 8;  // token width 4 * 16 + 8 = 72
  return c;
}

// First corpus reaction split into exactly `n` synthons.
std::size_t find_reaction(std::size_t n) {
  const auto data = semiretro::testing::decomposed_prefix(300);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].labeled() && data[i].synthons.size() == n)
      return i;
  }
  return data.size();
}

PreparedProduct prepared(std::size_t i) {
  const auto data = semiretro::testing::decomposed_prefix(i + 1);
  return prepare_product(semiretro::testing::mini_corpus()[i].product, data[i].label,
                         data[i].synthons);
}

TEST(SynthonModel, RepresentationBlocksMatchBruteForce) {
  const SynthonModel m(small_config(), 1);
  for (std::size_t n: { 1u, 2u }) {
    const std::size_t i = find_reaction(n);
    ASSERT_LT(i, 300u);
    const PreparedProduct p = prepared(i);
    const PreparedProduct *one[] = { &p };
    const Matrix rep = m.forward(one).representation.value();
    const int r = small_config().gnn.readout_width();
    ASSERT_EQ(rep.cols(), 4 * r);
    ASSERT_EQ(rep.rows(), static_cast<Eigen::Index>(n));
    const Matrix hp = m.gnn().forward(make_batch(p.product)).value();
    Matrix center = Matrix::Zero(1, r);
    for (int a: p.center_atoms)
      center += hp.row(a);
    center /= static_cast<double>(p.center_atoms.size());
    const Matrix product = hp.colwise().mean();
    std::vector<Matrix> synthon_means;
    for (const GraphFeatures &s: p.synthons)
      synthon_means.push_back(m.gnn().forward(make_batch(s)).value().colwise().mean());
    for (std::size_t j = 0; j < n; ++j) {
      const auto row = rep.row(static_cast<Eigen::Index>(j));
      EXPECT_LT((row.segment(0, r) - center.row(0)).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((row.segment(r, r) - synthon_means[j].row(0)).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((row.segment(2 * r, r) - synthon_means[p.dual[j]].row(0)).cwiseAbs().maxCoeff(),
                1e-12);
      EXPECT_LT((row.segment(3 * r, r) - product.row(0)).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(SynthonModel, UniformLogitsPickLowestClassAndCostLnK) {
  SynthonModel m(small_config(), 2);
  semiretro::testing::zero_params(m.params(), "sc.initial_head.2");
  semiretro::testing::zero_params(m.params(), "sc.refined_head.2");
  const PreparedProduct p = prepared(find_reaction(2));
  const PreparedProduct *one[] = { &p };
  const auto f = m.forward(one);
  for (int c: f.initial_class)
    EXPECT_EQ(c, 0);
  const std::vector<int> labels[] = { { 3, 151 } };
  const double lnk = std::log(151.0);
  EXPECT_NEAR(m.loss(one, labels).item(), 2 * 2 * lnk, 1e-12);
  m.set_correcting(false);
  EXPECT_NEAR(m.loss(one, labels).item(), 2 * lnk, 1e-12);
  for (const auto &s: m.predict(p)) {
    EXPECT_EQ(s.initial_class, 1);
    EXPECT_EQ(s.refined_class, 1);
  }
}

TEST(SynthonModel, RejectsOutOfRangeLabels) {
  const SynthonModel m(small_config(), 2);
  const PreparedProduct p = prepared(find_reaction(1));
  const PreparedProduct *one[] = { &p };
  const std::vector<int> zero[] = { { 0 } };
  const std::vector<int> high[] = { { 152 } };
  EXPECT_THROW(m.loss(one, zero), std::out_of_range);
  EXPECT_THROW(m.loss(one, high), std::out_of_range);
}

TEST(SynthonModel, RejectsEmptyReactionAtomSet) {
  const chem::MolGraph mol = chem::parse_smiles("CCO");
  EXPECT_THROW(prepare_product(mol, {}, {}), std::invalid_argument);
}

TEST(SynthonModel, RejectsIndivisibleTokenWidth) {
  SynthonModelConfig c = small_config();
  c.class_embedding = 7;
  EXPECT_THROW(SynthonModel(c, 1), std::invalid_argument);
}

TEST(SynthonModel, DistributionsAreNormalized) {
  const SynthonModel m(small_config(), 3);
  for (std::size_t n: { 1u, 2u }) {
    for (const auto &s: m.predict(prepared(find_reaction(n)))) {
      EXPECT_NEAR(std::accumulate(s.initial.begin(), s.initial.end(), 0.0), 1.0, 1e-9);
      EXPECT_NEAR(std::accumulate(s.refined.begin(), s.refined.end(), 0.0), 1.0, 1e-9);
      EXPECT_GE(*std::min_element(s.refined.begin(), s.refined.end()), 0.0);
    }
  }
}

TEST(SynthonModel, CorrectionOffRefinedEqualsInitial) {
  SynthonModel m(small_config(), 4);
  m.set_correcting(false);
  for (const auto &s: m.predict(prepared(find_reaction(2)))) {
    EXPECT_EQ(s.initial, s.refined);
    EXPECT_EQ(s.initial_class, s.refined_class);
  }
}

TEST(SynthonModel, ZeroedResidualBranchesPassTokensThrough) {
  SynthonModel m(small_config(), 5);
  for (int l = 0; l < small_config().transformer_layers; ++l) {
    const std::string b = "sc.transformer" + std::to_string(l);
    semiretro::testing::zero_params(m.params(), b + ".o.");
    semiretro::testing::zero_params(m.params(), b + ".ffn.1.");
  }
  const PreparedProduct p2 = prepared(find_reaction(2));
  const PreparedProduct p1 = prepared(find_reaction(1));
  const PreparedProduct *both[] = { &p2, &p1 };
  std::mt19937_64 rng(6);
  const Tensor z(semiretro::testing::random_matrix(3, m.token_width(), rng));
  EXPECT_EQ((m.correct(both, z).value() - z.value()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(SynthonModel, PredictionFollowsSynthonsNotListOrder) {
  const SynthonModel m(small_config(), 7);
  const std::size_t i = find_reaction(2);
  const auto data = semiretro::testing::decomposed_prefix(i + 1);
  const auto &product = semiretro::testing::mini_corpus()[i].product;
  std::vector<reaction::Synthon> swapped = { data[i].synthons[1], data[i].synthons[0] };
  for (auto &s: swapped) {
    s.dual = 1 - s.dual;
    for (int &l: s.linked)
      l = 1 - l;
    std::sort(s.linked.begin(), s.linked.end());
  }
  const auto a = m.predict(prepare_product(product, data[i].label, data[i].synthons));
  const auto b = m.predict(prepare_product(product, data[i].label, swapped));
  for (int j = 0; j < 2; ++j) {
    for (std::size_t c = 0; c < a[j].refined.size(); ++c)
      EXPECT_NEAR(a[j].refined[c], b[1 - j].refined[c], 1e-12);
  }
}

TEST(SynthonModel, ParameterGradientsMatchFiniteDifferences) {
  SynthonModelConfig c;
  c.gnn.width = 4;
  c.gnn.layers = 1;
  c.gnn.heads = 2;
  c.hidden = 6;
  c.num_classes = 5;
  c.class_embedding = 4;  // token width 20
  SynthonModel m(c, 8);
  const PreparedProduct p2 = prepared(find_reaction(2));
  const PreparedProduct p1 = prepared(find_reaction(1));
  const PreparedProduct *both[] = { &p2, &p1 };
  const std::vector<int> labels[] = { { 2, 5 }, { 1 } };
  std::mt19937_64 pick(9);
  for (bool correcting: { true, false }) {
    m.set_correcting(correcting);
    EXPECT_LT(semiretro::testing::param_gradcheck(
                  m.params(), [&] { return m.loss(both, labels); }, pick, 3),
              1e-6)
        << correcting;
  }
}

TEST(SynthonModel, OverfitsFiftySynthons) {
  const auto data = semiretro::testing::decomposed_prefix(40);
  const auto &rxns = semiretro::testing::mini_corpus();
  const auto library = reaction::TemplateLibrary::build(data);
  const auto examples = pipeline::make_sc_examples(
      data, std::span<const reaction::Reaction>(rxns.data(), data.size()), library);
  std::size_t synthons = 0;
  for (const auto &e: examples)
    synthons += e.classes.size();
  ASSERT_GE(synthons, 50u);
  SynthonModelConfig c = small_config();
  c.gnn.width = 16;
  c.gnn.heads = 4;
  c.hidden = 32;
  c.class_embedding = 16;  // token width 144
  SynthonModel m(c, 10);
  pipeline::TrainOptions opt;
  opt.epochs = 150;
  opt.batch_size = 8;
  opt.max_lr = 3e-3;
  opt.seed = 11;
  pipeline::train_synthon_model(m, examples, opt);
  const int ks[] = { 1 };
  EXPECT_DOUBLE_EQ(pipeline::synthon_accuracy(m, examples, ks, nullptr)[0], 1.0);
}

// ---- joint ranking -------------------------------------------------------

std::vector<std::vector<double>> random_dists(int n, int k, std::mt19937_64 &rng,
                                              int levels = 0) {
  std::vector<std::vector<double>> out(n, std::vector<double>(k));
  for (auto &d: out) {
    double z = 0.0;
    for (double &v: d) {
      const double u = tensor::uniform01(rng);
      v = levels > 0 ? 1.0 + std::floor(u * levels) : u + 1e-3;
      z += v;
    }
    for (double &v: d)
      v /= z;
  }
  return out;
}

// Every assignment scored, optionally filtered by the pair prior, then sorted.
std::vector<JointCandidate> brute_force(const std::vector<std::vector<double>> &dists,
                                        std::span<const std::pair<int, int>> links,
                                        const reaction::TemplateLibrary *prior) {
  const int n = static_cast<int>(dists.size());
  const int k = static_cast<int>(dists[0].size());
  int total = 1;
  for (int s = 0; s < n; ++s)
    total *= k;
  std::vector<JointCandidate> all;
  for (int code = 0; code < total; ++code) {
    JointCandidate c;
    c.prob = 1.0;
    for (int s = 0, rest = code; s < n; ++s, rest /= k) {
      c.classes.push_back(rest % k + 1);
      c.prob *= dists[s][rest % k];
    }
    bool keep = true;
    for (auto [a, b]: links)
      keep = keep && (!prior || prior->pair_count(c.classes[a], c.classes[b]) > 0);
    if (keep)
      all.push_back(c);
  }
  std::sort(all.begin(), all.end(), [](const JointCandidate &a, const JointCandidate &b) {
    return std::tie(b.prob, a.classes) < std::tie(a.prob, b.classes);
  });
  return all;
}

void expect_same(const std::vector<JointCandidate> &got, const std::vector<JointCandidate> &want,
                 std::size_t k) {
  ASSERT_EQ(got.size(), std::min(k, want.size()));
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].classes, want[i].classes) << i;
    EXPECT_DOUBLE_EQ(got[i].prob, want[i].prob);
  }
}

TEST(JointRanking, MatchesBruteForceOnThreeByThree) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    // Half the trials use coarse levels to create ties.
    const auto dists = random_dists(3, 3, rng, trial % 2 ? 2 : 0);
    const auto want = brute_force(dists, {}, nullptr);
    for (int k = 1; k <= 27; ++k)
      expect_same(topk_templates(dists, {}, k, nullptr), want, k);
  }
}

TEST(JointRanking, MatchesBruteForceWithPriorFilter) {
  const auto data = semiretro::testing::decomposed_prefix(300);
  const auto library = reaction::TemplateLibrary::build(data, 4);
  ASSERT_EQ(library.num_classes(), 5);
  const std::pair<int, int> links[] = { { 0, 1 } };
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto dists = random_dists(2, 5, rng, trial % 2 ? 3 : 0);
    const auto want = brute_force(dists, links, &library);
    ASSERT_LT(want.size(), 25u);  // the prior removes something
    for (int k = 1; k <= 25; ++k)
      expect_same(topk_templates(dists, links, k, &library), want, k);
  }
}

TEST(JointRanking, PriorFilterKeepsOnlySeenPairs) {
  const auto data = semiretro::testing::decomposed_prefix(300);
  const auto library = reaction::TemplateLibrary::build(data);
  ASSERT_FALSE(library.pair_prior().empty());
  const auto [seen, count] = *library.pair_prior().begin();
  ASSERT_GT(count, 0u);
  std::pair<int, int> unseen { -1, -1 };
  for (int a = 1; a <= library.num_classes() && unseen.first < 0; ++a) {
    for (int b = 1; b <= library.num_classes(); ++b) {
      if (library.pair_count(a, b) == 0) {
        unseen = { a, b };
        break;
      }
    }
  }
  ASSERT_GT(unseen.first, 0);
  const std::vector<JointCandidate> in = {
    { { seen.first, seen.second }, 0.5 },
    { { unseen.first, unseen.second }, 0.4 },
  };
  const std::pair<int, int> links[] = { { 0, 1 } };
  const auto out = prior_filter(in, links, library);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].classes, in[0].classes);
  EXPECT_EQ(prior_filter(in, {}, library).size(), 2u);
}

TEST(JointRanking, LinksFollowCutBonds) {
  const std::size_t i = find_reaction(2);
  const auto data = semiretro::testing::decomposed_prefix(i + 1);
  const auto links = synthon_links(data[i].synthons);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0], std::make_pair(0, 1));
  EXPECT_TRUE(synthon_links(semiretro::testing::decomposed_prefix(find_reaction(1) + 1)
                                [find_reaction(1)].synthons)
                  .empty());
}

}  // namespace
}  // namespace semiretro::model
