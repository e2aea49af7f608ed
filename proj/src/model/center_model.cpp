//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/model/center_model.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "semiretro/chem/canonical.h"
#include "semiretro/chem/features.h"

namespace semiretro::model {

using tensor::Matrix;
using tensor::Tensor;

namespace {

// Graph id of every directed edge and the bond it belongs to.
std::vector<int> edge_graphs(const GraphBatch &g) {
  std::vector<int> out(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e)
    out[e] = g.graph_of_atom[g.src[e]];
  return out;
}

std::vector<int> edge_bonds(const GraphBatch &g) {
  std::vector<int> out(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e)
    out[e] = e / 2;
  return out;
}

}  // namespace

std::vector<CenterCandidate> rank_centers(const chem::MolGraph &product,
                                          std::span<const double> atom_probs,
                                          std::span<const double> bond_probs) {
  chem::CanonicalOptions opts;
  opts.atom_maps = false;
  opts.stereo = false;
  const std::vector<int> rank = chem::canonicalize(product, opts).ranks;

  struct Entry {
    CenterCandidate c;
    std::pair<int, int> key;  // canonical ranks, atom centers use (r, -1)
  };
  std::vector<Entry> entries;
  for (int i = 0; i < product.num_atoms(); ++i)
    entries.push_back({ { reaction::CenterLabel::from_center({ i, -1 }), atom_probs[i] },
                        { rank[i], -1 } });
  for (int b = 0; b < product.num_bonds(); ++b) {
    int u = product.bond(b).begin, v = product.bond(b).end;
    if (u > v)
      std::swap(u, v);
    const int ru = rank[u], rv = rank[v];
    entries.push_back({ { reaction::CenterLabel::from_center({ u, v }), bond_probs[b] },
                        { std::min(ru, rv), std::max(ru, rv) } });
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry &x, const Entry &y) {
    if (x.c.prob != y.c.prob)
      return x.c.prob > y.c.prob;
    const bool xa = x.key.second < 0, ya = y.key.second < 0;
    if (xa != ya)
      return xa;
    return x.key < y.key;
  });
  std::vector<CenterCandidate> out;
  for (auto &e: entries)
    out.push_back(std::move(e.c));
  return out;
}

std::vector<CenterDecomposition> decompose_top(const chem::MolGraph &product,
                                               std::span<const CenterCandidate> ranked, int k) {
  std::vector<CenterDecomposition> out;
  for (int i = 0; i < k && i < static_cast<int>(ranked.size()); ++i) {
    out.push_back({ ranked[i].label, ranked[i].prob,
                    reaction::break_into_synthons(product, ranked[i].label) });
  }
  return out;
}

CenterModel::CenterModel(const CenterModelConfig &config, std::uint64_t seed)
    : config_(config) {
  std::mt19937_64 rng(seed);
  gnn_ = DrgatStack(params_, "ci.gnn", config.gnn, rng);
  const int r = config.gnn.readout_width();
  atom_head_ = Mlp(params_, "ci.atom_head", { 2 * r, config.hidden, config.hidden, 1 }, rng);
  bond_head_ = Mlp(params_, "ci.bond_head",
                   { chem::kBondFeatureWidth + 3 * r, config.hidden, config.hidden, 1 }, rng);
}

CenterModel::Representations CenterModel::representations(const GraphBatch &g,
                                                          const Tensor &h) const {
  const Tensor pooled = tensor::mean_pool(h, g.graph_of_atom, g.num_graphs);
  const Tensor atom_parts[] = { h, tensor::gather_rows(pooled, g.graph_of_atom) };
  const Tensor edge_parts[] = { Tensor(g.edges), tensor::gather_rows(h, g.src),
                                tensor::gather_rows(h, g.dst),
                                tensor::gather_rows(pooled, edge_graphs(g)) };
  return { tensor::concat_cols(atom_parts), tensor::concat_cols(edge_parts) };
}

CenterModel::Logits CenterModel::forward(const GraphBatch &g, std::mt19937_64 *train_rng) const {
  const Representations rep = representations(g, gnn_.forward(g, train_rng));
  const Tensor directed = bond_head_(rep.edges);
  return { atom_head_(rep.atoms), tensor::mean_pool(directed, edge_bonds(g), g.num_edges() / 2) };
}

Matrix atom_targets(const GraphBatch &g, std::span<const reaction::CenterLabel> labels) {
  Matrix t = Matrix::Zero(g.num_atoms(), 1);
  for (int gi = 0; gi < g.num_graphs; ++gi) {
    for (int a: labels[gi].atom_centers)
      t(g.atom_offset[gi] + a, 0) = 1.0;
  }
  return t;
}

Matrix bond_targets(const GraphBatch &g, std::span<const reaction::CenterLabel> labels) {
  Matrix t = Matrix::Zero(g.num_edges() / 2, 1);
  for (int gi = 0; gi < g.num_graphs; ++gi) {
    const int a0 = g.atom_offset[gi];
    for (int b = g.bond_offset[gi]; b < g.bond_offset[gi + 1]; ++b) {
      int u = g.src[2 * b] - a0, v = g.dst[2 * b] - a0;
      if (u > v)
        std::swap(u, v);
      const auto &bc = labels[gi].bond_centers;
      if (std::find(bc.begin(), bc.end(), std::make_pair(u, v)) != bc.end())
        t(b, 0) = 1.0;
    }
  }
  return t;
}

Tensor CenterModel::loss(const GraphBatch &g,
                         std::span<const reaction::CenterLabel> labels,
                         std::mt19937_64 *train_rng) const {
  const Logits logits = forward(g, train_rng);
  Tensor atom_loss = tensor::bce_with_logits(logits.atoms, atom_targets(g, labels));
  if (g.num_edges() == 0)
    return atom_loss;
  return tensor::add(atom_loss, tensor::bce_with_logits(logits.bonds, bond_targets(g, labels)));
}

CenterPrediction CenterModel::predict(const chem::MolGraph &product) const {
  const GraphFeatures f = featurize(product);
  const Logits logits = forward(make_batch(f));
  CenterPrediction out;
  const Matrix pa = tensor::sigmoid(logits.atoms).value();
  const Matrix pb = tensor::sigmoid(logits.bonds).value();
  out.atom_probs.assign(pa.data(), pa.data() + pa.size());
  out.bond_probs.assign(pb.data(), pb.data() + pb.size());
  out.ranked = rank_centers(product, out.atom_probs, out.bond_probs);
  return out;
}

std::vector<CenterDecomposition> CenterModel::topk_centers(const chem::MolGraph &product,
                                                           int k) const {
  const CenterPrediction p = predict(product);
  return decompose_top(product, p.ranked, k);
}

}  // namespace semiretro::model
