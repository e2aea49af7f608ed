//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/model/synthon_model.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "semiretro/chem/canonical.h"

namespace semiretro::model {

using tensor::Matrix;
using tensor::Tensor;

PreparedProduct prepare_product(const chem::MolGraph &product,
                                const reaction::CenterLabel &label,
                                const std::vector<reaction::Synthon> &synthons) {
  PreparedProduct p;
  p.product = featurize(product);
  p.center_atoms = label.atom_centers;
  for (auto [a, b]: label.bond_centers) {
    p.center_atoms.push_back(a);
    p.center_atoms.push_back(b);
  }
  std::sort(p.center_atoms.begin(), p.center_atoms.end());
  p.center_atoms.erase(std::unique(p.center_atoms.begin(), p.center_atoms.end()),
                       p.center_atoms.end());
  if (p.center_atoms.empty())
    throw std::invalid_argument("synthon representation needs a non-empty reaction atom set");

  chem::CanonicalOptions opts;
  opts.atom_maps = false;
  opts.stereo = false;
  std::vector<std::string> keys;
  for (std::size_t j = 0; j < synthons.size(); ++j) {
    p.synthons.push_back(featurize(synthons[j].graph));
    p.dual.push_back(synthons[j].dual >= 0 ? synthons[j].dual : static_cast<int>(j));
    keys.push_back(chem::canonicalize(synthons[j].graph, opts).smiles);
  }
  std::vector<int> order(synthons.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return keys[x] < keys[y]; });
  p.canonical_order.resize(synthons.size());
  for (std::size_t r = 0; r < order.size(); ++r)
    p.canonical_order[order[r]] = static_cast<int>(r);
  return p;
}

SynthonModel::SynthonModel(const SynthonModelConfig &config, std::uint64_t seed)
    : config_(config) {
  if (token_width() % config.transformer_heads != 0)
    throw std::invalid_argument("token width must be divisible by the transformer heads");
  std::mt19937_64 rng(seed);
  gnn_ = DrgatStack(params_, "sc.gnn", config.gnn, rng);
  const int rep = 4 * config.gnn.readout_width();
  initial_head_ = Mlp(params_, "sc.initial_head",
                      { rep, config.hidden, config.hidden, config.num_classes }, rng);
  embedding_ = params_.add("sc.class_embedding",
                           tensor::glorot(config.num_classes, config.class_embedding, rng));
  const int z = token_width();
  for (int l = 0; l < config.transformer_layers; ++l) {
    const std::string name = "sc.transformer" + std::to_string(l);
    blocks_.push_back({ Linear(params_, name + ".q", z, z, rng), Linear(params_, name + ".k", z, z, rng),
                        Linear(params_, name + ".v", z, z, rng), Linear(params_, name + ".o", z, z, rng),
                        Mlp(params_, name + ".ffn", { z, z, z }, rng) });
  }
  refined_head_ = Mlp(params_, "sc.refined_head",
                      { z, config.hidden, config.hidden, config.num_classes }, rng);
}

int SynthonModel::token_width() const {
  return 4 * config_.gnn.readout_width() + config_.class_embedding;
}

Tensor SynthonModel::class_embedding(std::span<const int> class_index) const {
  return tensor::gather_rows(embedding_, class_index);
}

Tensor SynthonModel::correct(std::span<const PreparedProduct *const> batch, const Tensor &z) const {
  // One 2-token sequence per unordered (synthon, dual) pair, in canonical
  // order; singletons repeat the synthon.
  std::vector<int> token_source, token_of_synthon;
  int base = 0;
  for (const PreparedProduct *p: batch) {
    std::map<std::pair<int, int>, int> seq_of_pair;
    const int n = static_cast<int>(p->synthons.size());
    for (int j = 0; j < n; ++j) {
      int first = j, second = p->dual[j];
      if (p->canonical_order[second] < p->canonical_order[first])
        std::swap(first, second);
      auto [it, fresh] = seq_of_pair.try_emplace({ first, second },
                                                 static_cast<int>(token_source.size()) / 2);
      if (fresh) {
        token_source.push_back(base + first);
        token_source.push_back(base + second);
      }
      token_of_synthon.push_back(2 * it->second + (j == first ? 0 : 1));
    }
    base += n;
  }
  const int tokens = static_cast<int>(token_source.size());
  std::vector<int> src, dst;
  for (int s = 0; s < tokens / 2; ++s) {
    for (int d = 0; d < 2; ++d) {
      for (int r = 0; r < 2; ++r) {
        src.push_back(2 * s + r);
        dst.push_back(2 * s + d);
      }
    }
  }
  const int heads = config_.transformer_heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(token_width() / heads));
  Tensor x = tensor::gather_rows(z, token_source);
  for (const Block &b: blocks_) {
    const Tensor q = tensor::gather_rows(b.q(x), dst);
    const Tensor k = tensor::gather_rows(b.k(x), src);
    const Tensor v = tensor::gather_rows(b.v(x), src);
    const Tensor alpha = tensor::segment_softmax(
        tensor::scale(tensor::dot_heads(q, k, heads), inv_sqrt), dst, tokens);
    const Tensor att = tensor::segment_sum(tensor::mul_heads(v, alpha), dst, tokens);
    x = tensor::add(x, b.o(att));
    x = tensor::add(x, b.ffn(x));
  }
  return tensor::gather_rows(x, token_of_synthon);
}

SynthonModel::Forward SynthonModel::forward(std::span<const PreparedProduct *const> batch,
                                           std::mt19937_64 *train_rng) const {
  std::vector<const GraphFeatures *> products, synthons;
  std::vector<int> center_rows, center_seg, dual_global, product_of;
  int s_base = 0, a_base = 0;
  for (std::size_t pi = 0; pi < batch.size(); ++pi) {
    const PreparedProduct &p = *batch[pi];
    products.push_back(&p.product);
    for (std::size_t j = 0; j < p.synthons.size(); ++j) {
      synthons.push_back(&p.synthons[j]);
      for (int a: p.center_atoms) {
        center_rows.push_back(a_base + a);
        center_seg.push_back(s_base + static_cast<int>(j));
      }
      dual_global.push_back(s_base + p.dual[j]);
      product_of.push_back(static_cast<int>(pi));
    }
    s_base += static_cast<int>(p.synthons.size());
    a_base += p.product.num_atoms();
  }
  const GraphBatch gp = make_batch(products);
  const GraphBatch gs = make_batch(synthons);
  const Tensor hp = gnn_.forward(gp, train_rng);
  const Tensor hs = gnn_.forward(gs, train_rng);

  const Tensor synthon_mean = tensor::mean_pool(hs, gs.graph_of_atom, gs.num_graphs);
  const Tensor product_mean = tensor::mean_pool(hp, gp.graph_of_atom, gp.num_graphs);
  const Tensor blocks[] = {
    tensor::mean_pool(tensor::gather_rows(hp, center_rows), center_seg, s_base),
    synthon_mean,
    tensor::gather_rows(synthon_mean, dual_global),
    tensor::gather_rows(product_mean, product_of),
  };
  Forward out;
  out.representation = tensor::concat_cols(blocks);
  out.initial_logits = initial_head_(out.representation);
  const Matrix &l = out.initial_logits.value();
  for (Eigen::Index r = 0; r < l.rows(); ++r) {
    Eigen::Index best = 0;
    l.row(r).maxCoeff(&best);  // first maximum, so the lowest class id wins ties
    out.initial_class.push_back(static_cast<int>(best));
  }
  if (!correcting_) {
    out.refined_logits = out.initial_logits;
    return out;
  }
  const Tensor parts[] = { out.representation, class_embedding(out.initial_class) };
  out.refined_logits = refined_head_(correct(batch, tensor::concat_cols(parts)));
  return out;
}

Tensor SynthonModel::loss(std::span<const PreparedProduct *const> batch,
                          std::span<const std::vector<int>> labels,
                          std::mt19937_64 *train_rng) const {
  std::vector<int> target;
  for (std::size_t pi = 0; pi < batch.size(); ++pi) {
    if (labels[pi].size() != batch[pi]->synthons.size())
      throw std::invalid_argument("one label per synthon required");
    for (int c: labels[pi]) {
      if (c < 1 || c > config_.num_classes)
        throw std::out_of_range("template class " + std::to_string(c) + " outside 1.."
                                + std::to_string(config_.num_classes));
      target.push_back(c - 1);
    }
  }
  const Forward f = forward(batch, train_rng);
  Tensor loss = tensor::cross_entropy(f.initial_logits, target);
  if (correcting_)
    loss = tensor::add(loss, tensor::cross_entropy(f.refined_logits, target));
  return loss;
}

std::vector<SynthonPrediction> SynthonModel::predict(const PreparedProduct &p) const {
  const PreparedProduct *one[] = { &p };
  const Forward f = forward(one);
  const Matrix initial = tensor::softmax(f.initial_logits).value();
  const Matrix refined = tensor::softmax(f.refined_logits).value();
  std::vector<SynthonPrediction> out;
  for (Eigen::Index r = 0; r < initial.rows(); ++r) {
    SynthonPrediction s;
    s.initial.assign(initial.row(r).data(), initial.row(r).data() + initial.cols());
    s.refined.assign(refined.row(r).data(), refined.row(r).data() + refined.cols());
    s.initial_class = static_cast<int>(std::max_element(s.initial.begin(), s.initial.end())
                                       - s.initial.begin()) + 1;
    s.refined_class = static_cast<int>(std::max_element(s.refined.begin(), s.refined.end())
                                       - s.refined.begin()) + 1;
    out.push_back(std::move(s));
  }
  return out;
}

// ---- joint ranking -------------------------------------------------------

std::vector<JointCandidate> prior_filter(std::vector<JointCandidate> candidates,
                                         std::span<const std::pair<int, int>> links,
                                         const reaction::TemplateLibrary &library) {
  std::erase_if(candidates, [&](const JointCandidate &c) {
    for (auto [i, j]: links) {
      if (library.pair_count(c.classes[i], c.classes[j]) == 0)
        return true;
    }
    return false;
  });
  return candidates;
}

namespace {

bool passes_prior(std::span<const int> classes, std::span<const std::pair<int, int>> links,
                  const reaction::TemplateLibrary &library) {
  for (auto [i, j]: links) {
    if (library.pair_count(classes[i], classes[j]) == 0)
      return false;
  }
  return true;
}

}  // namespace

// Best-first walk over the grid of per-synthon ranks. Each synthon's classes
// are sorted by probability (ties by class id); a successor advances one rank,
// so it never beats its parent and is lexicographically larger on ties. The
// frontier therefore pops in (probability desc, classes asc) order, and
// filtered-out assignments are skipped without bounding the search depth.
std::vector<JointCandidate> topk_templates(std::span<const std::vector<double>> dists,
                                           std::span<const std::pair<int, int>> links, int k,
                                           const reaction::TemplateLibrary *prior) {
  std::vector<JointCandidate> out;
  if (dists.empty() || k <= 0)
    return out;
  const std::size_t ns = dists.size();
  std::vector<std::vector<int>> order;  // class ids by rank
  for (const auto &d: dists) {
    if (d.empty())
      return out;
    std::vector<int> idx(d.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] > d[b]; });
    for (int &c: idx)
      ++c;
    order.push_back(std::move(idx));
  }
  struct Node {
    double prob;
    std::vector<int> classes;
    std::vector<int> rank;
  };
  auto make = [&](std::vector<int> rank) {
    Node n { 1.0, std::vector<int>(ns), std::move(rank) };
    for (std::size_t s = 0; s < ns; ++s) {
      n.classes[s] = order[s][n.rank[s]];
      n.prob *= dists[s][n.classes[s] - 1];
    }
    return n;
  };
  // Max-heap on probability, then smallest class vector.
  auto worse = [](const Node &a, const Node &b) {
    if (a.prob != b.prob)
      return a.prob < b.prob;
    return a.classes > b.classes;
  };
  std::vector<Node> heap { make(std::vector<int>(ns, 0)) };
  std::set<std::vector<int>> seen { heap.front().rank };
  while (!heap.empty() && static_cast<int>(out.size()) < k) {
    std::pop_heap(heap.begin(), heap.end(), worse);
    Node n = std::move(heap.back());
    heap.pop_back();
    for (std::size_t s = 0; s < ns; ++s) {
      if (n.rank[s] + 1 >= static_cast<int>(order[s].size()))
        continue;
      std::vector<int> next = n.rank;
      ++next[s];
      if (!seen.insert(next).second)
        continue;
      heap.push_back(make(std::move(next)));
      std::push_heap(heap.begin(), heap.end(), worse);
    }
    if (!prior || passes_prior(n.classes, links, *prior))
      out.push_back({ std::move(n.classes), n.prob });
  }
  return out;
}

std::vector<std::pair<int, int>> synthon_links(const std::vector<reaction::Synthon> &synthons) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < synthons.size(); ++i) {
    for (int j: synthons[i].linked) {
      if (static_cast<int>(i) < j)
        out.emplace_back(static_cast<int>(i), j);
    }
  }
  return out;
}

}  // namespace semiretro::model
