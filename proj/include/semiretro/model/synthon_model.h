//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_MODEL_SYNTHON_MODEL_H_
#define SEMIRETRO_MODEL_SYNTHON_MODEL_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "semiretro/model/drgat.h"
#include "semiretro/reaction/reaction.h"
#include "semiretro/reaction/synthon.h"
#include "semiretro/reaction/template_library.h"
#include "semiretro/tensor/optim.h"

namespace semiretro::model {

struct SynthonModelConfig {
  DrgatConfig gnn;
  int hidden = 256;
  int num_classes = reaction::TemplateLibrary::kDefaultK + 1;
  int class_embedding = 64;  // must keep 4 * readout + this divisible by heads
  int transformer_layers = 2;
  int transformer_heads = 4;
};

// A product with one candidate decomposition, featurized once.
struct PreparedProduct {
  GraphFeatures product;
  std::vector<GraphFeatures> synthons;
  std::vector<int> center_atoms;  // reaction atom set, product indices
  std::vector<int> dual;          // per synthon; itself for singletons
  // Per synthon, its position when synthons are sorted by canonical SMILES
  // (ties by index). Fixes the token order of each pair.
  std::vector<int> canonical_order;
};

PreparedProduct prepare_product(const chem::MolGraph &product,
                                const reaction::CenterLabel &label,
                                const std::vector<reaction::Synthon> &synthons);

// Class ids are 1..num_classes throughout; index c - 1 of a distribution.
struct SynthonPrediction {
  std::vector<double> initial;  // softmax of the first head
  int initial_class = 0;
  std::vector<double> refined;  // after self-correction (== initial when off)
  int refined_class = 0;
};

class SynthonModel {
public:
  struct Forward {
    tensor::Tensor representation;  // synthons x 4R
    tensor::Tensor initial_logits;
    tensor::Tensor refined_logits;  // same tensor as initial when correcting is off
    std::vector<int> initial_class;
  };

  explicit SynthonModel(const SynthonModelConfig &config, std::uint64_t seed = 0);
  SynthonModel(const SynthonModel &) = delete;
  SynthonModel &operator=(const SynthonModel &) = delete;

  // Synthons of all products in order, each product's synthons contiguous.
  Forward forward(std::span<const PreparedProduct *const> batch,
                  std::mt19937_64 *train_rng = nullptr) const;

  // Cross-entropy of the first head plus, with correction on, of the
  // refined head; summed over synthons. `labels` holds class ids per product.
  tensor::Tensor loss(std::span<const PreparedProduct *const> batch,
                      std::span<const std::vector<int>> labels,
                      std::mt19937_64 *train_rng = nullptr) const;

  std::vector<SynthonPrediction> predict(const PreparedProduct &p) const;

  // Self-correction on given first-head outputs; exposed for tests. `z` is
  // one row per synthon (representation | class embedding).
  tensor::Tensor correct(std::span<const PreparedProduct *const> batch, const tensor::Tensor &z) const;
  tensor::Tensor class_embedding(std::span<const int> class_index) const;

  bool correcting() const { return correcting_; }
  void set_correcting(bool on) { correcting_ = on; }

  const SynthonModelConfig &config() const { return config_; }
  tensor::ParameterStore &params() { return params_; }
  const tensor::ParameterStore &params() const { return params_; }
  const DrgatStack &gnn() const { return gnn_; }
  int token_width() const;

private:
  struct Block {
    Linear q, k, v, o;
    Mlp ffn;
  };

  SynthonModelConfig config_;
  tensor::ParameterStore params_;
  DrgatStack gnn_;
  Mlp initial_head_;
  tensor::Tensor embedding_;
  std::vector<Block> blocks_;
  Mlp refined_head_;
  bool correcting_ = true;
};

// One joint template assignment for the synthons of a product.
struct JointCandidate {
  std::vector<int> classes;  // class id per synthon
  double prob = 0.0;
};

// Drops candidates whose classes on some pair of linked synthons never
// co-occurred in training. `links` lists synthon index pairs; products
// without links pass unchanged.
std::vector<JointCandidate> prior_filter(std::vector<JointCandidate> candidates,
                                         std::span<const std::pair<int, int>> links,
                                         const reaction::TemplateLibrary &library);

// The k most probable joint assignments (probability = product of the
// per-synthon probabilities) among those passing the pair prior when one is
// given; ordered by probability, ties by class ids. Exact for any k.
std::vector<JointCandidate> topk_templates(std::span<const std::vector<double>> dists,
                                           std::span<const std::pair<int, int>> links, int k,
                                           const reaction::TemplateLibrary *prior);

// Linked synthon pairs (i < j) of a decomposition.
std::vector<std::pair<int, int>> synthon_links(const std::vector<reaction::Synthon> &synthons);

}  // namespace semiretro::model

#endif  // SEMIRETRO_MODEL_SYNTHON_MODEL_H_
