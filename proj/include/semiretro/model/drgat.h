//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_MODEL_DRGAT_H_
#define SEMIRETRO_MODEL_DRGAT_H_

#include <random>
#include <string>
#include <vector>

#include "semiretro/model/graph_batch.h"
#include "semiretro/model/nn.h"

namespace semiretro::model {

struct DrgatConfig {
  int width = 256;
  int layers = 6;
  int heads = 4;
  // Applied to each layer's aggregated messages when training with an RNG.
  double dropout = 0.0;

  int readout_width() const { return width * layers; }
};

// Directed relational graph attention. For a directed edge e = (u -> v):
//   m_e     = src(h_u) + dst(h_v) + bond(x_e)
//   s_e,k   = LeakyReLU(a_k . [src(h_u) | dst(h_v) | bond(x_e)])
//   alpha   = softmax of s over the in-edges of v, per head k
//   h'_v    = h_v + ReLU(sum_e alpha_e,k m_e[head k block])
// There are no self-loops; an atom without in-edges keeps h_v.
class DrgatLayer {
public:
  struct Output {
    tensor::Tensor h;
    tensor::Tensor attention;  // edges x heads
  };

  DrgatLayer() = default;
  DrgatLayer(tensor::ParameterStore &store, const std::string &name, int width, int heads,
             std::mt19937_64 &rng, double dropout = 0.0);

  // `train_rng` enables dropout; inference passes nothing.
  Output forward(const GraphBatch &g, const tensor::Tensor &h, const tensor::Tensor &edges,
                 std::mt19937_64 *train_rng = nullptr) const;

  int width() const { return width_; }
  int heads() const { return heads_; }

private:
  int width_ = 0;
  int heads_ = 0;
  double dropout_ = 0.0;
  Mlp src_;
  Mlp dst_;
  Mlp bond_;
  Linear score_;
};

// Linear atom encoder followed by stacked layers; the readout concatenates
// every layer's output, so it is num_atoms x (layers * width).
class DrgatStack {
public:
  DrgatStack() = default;
  DrgatStack(tensor::ParameterStore &store, const std::string &name, const DrgatConfig &config,
             std::mt19937_64 &rng);

  tensor::Tensor forward(const GraphBatch &g, std::mt19937_64 *train_rng = nullptr) const;
  // Per-layer outputs, for inspection.
  std::vector<DrgatLayer::Output> forward_layers(const GraphBatch &g,
                                                 std::mt19937_64 *train_rng = nullptr) const;

  const DrgatConfig &config() const { return config_; }
  int readout_width() const { return config_.readout_width(); }

private:
  DrgatConfig config_;
  Linear encoder_;
  std::vector<DrgatLayer> layers_;
};

}  // namespace semiretro::model

#endif  // SEMIRETRO_MODEL_DRGAT_H_
