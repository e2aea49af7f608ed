//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/model/drgat.h"

#include <stdexcept>

#include "semiretro/chem/features.h"

namespace semiretro::model {

using tensor::Tensor;

DrgatLayer::DrgatLayer(tensor::ParameterStore &store, const std::string &name, int width,
                       int heads, std::mt19937_64 &rng, double dropout)
    : width_(width), heads_(heads), dropout_(dropout),
      src_(store, name + ".src", { width, width, width }, rng),
      dst_(store, name + ".dst", { width, width, width }, rng),
      bond_(store, name + ".bond", { chem::kBondFeatureWidth, width, width }, rng),
      score_(store, name + ".score", 3 * width, heads, rng) {
  if (heads <= 0 || width % heads != 0)
    throw std::invalid_argument("width must be a positive multiple of heads");
}

DrgatLayer::Output DrgatLayer::forward(const GraphBatch &g, const Tensor &h,
                                       const Tensor &edges, std::mt19937_64 *train_rng) const {
  const Tensor s = gather_rows(src_(h), g.src);
  const Tensor t = gather_rows(dst_(h), g.dst);
  const Tensor b = bond_(edges);
  const Tensor parts[] = { s, t, b };
  const Tensor score = tensor::leaky_relu(score_(tensor::concat_cols(parts)));
  Tensor alpha = tensor::segment_softmax(score, g.dst, g.num_atoms());
  const Tensor message = tensor::add(tensor::add(s, t), b);
  Tensor agg = tensor::segment_sum(tensor::mul_heads(message, alpha), g.dst, g.num_atoms());
  if (train_rng)
    agg = tensor::dropout(agg, dropout_, true, *train_rng);
  return { tensor::add(h, tensor::relu(agg)), alpha };
}

DrgatStack::DrgatStack(tensor::ParameterStore &store, const std::string &name,
                       const DrgatConfig &config, std::mt19937_64 &rng)
    : config_(config),
      encoder_(store, name + ".encoder", chem::kAtomFeatureWidth, config.width, rng) {
  for (int l = 0; l < config.layers; ++l)
    layers_.emplace_back(store, name + ".layer" + std::to_string(l), config.width,
                         config.heads, rng, config.dropout);
}

std::vector<DrgatLayer::Output> DrgatStack::forward_layers(const GraphBatch &g,
                                                           std::mt19937_64 *train_rng) const {
  const Tensor edges(g.edges);
  Tensor h = encoder_(Tensor(g.atoms));
  std::vector<DrgatLayer::Output> out;
  for (const DrgatLayer &layer: layers_) {
    out.push_back(layer.forward(g, h, edges, train_rng));
    h = out.back().h;
  }
  return out;
}

Tensor DrgatStack::forward(const GraphBatch &g, std::mt19937_64 *train_rng) const {
  std::vector<Tensor> hs;
  for (auto &o: forward_layers(g, train_rng))
    hs.push_back(o.h);
  return tensor::concat_cols(hs);
}

}  // namespace semiretro::model
