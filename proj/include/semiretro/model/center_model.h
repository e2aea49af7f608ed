//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_MODEL_CENTER_MODEL_H_
#define SEMIRETRO_MODEL_CENTER_MODEL_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "semiretro/chem/mol_graph.h"
#include "semiretro/model/drgat.h"
#include "semiretro/reaction/reaction.h"
#include "semiretro/reaction/synthon.h"
#include "semiretro/tensor/optim.h"

namespace semiretro::model {

struct CenterModelConfig {
  DrgatConfig gnn;
  int hidden = 256;  // width of both hidden layers in each head
};

// One candidate decomposition: a set of centers (a single center for the
// trained model) and its probability.
struct CenterCandidate {
  reaction::CenterLabel label;
  double prob = 0.0;
};

struct CenterPrediction {
  std::vector<double> atom_probs;  // per product atom
  std::vector<double> bond_probs;  // per product bond
  // Every single atom and bond center, by probability descending; ties go to
  // atoms before bonds, then to the lower canonical atom ranks.
  std::vector<CenterCandidate> ranked;
};

// Single-center ranking shared by the model and by tests.
std::vector<CenterCandidate> rank_centers(const chem::MolGraph &product,
                                          std::span<const double> atom_probs,
                                          std::span<const double> bond_probs);

struct CenterDecomposition {
  reaction::CenterLabel label;
  double prob = 0.0;
  std::vector<reaction::Synthon> synthons;
};

// The first k ranked candidates, each broken into synthons.
std::vector<CenterDecomposition> decompose_top(const chem::MolGraph &product,
                                               std::span<const CenterCandidate> ranked, int k);

class CenterModel {
public:
  struct Representations {
    tensor::Tensor atoms;  // num_atoms x 2R: h_i | mean of h over the molecule
    // One row per directed edge u -> v: x_uv | h_u | h_v | molecule mean.
    tensor::Tensor edges;
  };
  struct Logits {
    tensor::Tensor atoms;  // num_atoms x 1
    // num_bonds x 1; the mean of the head over both bond orientations.
    tensor::Tensor bonds;
  };

  explicit CenterModel(const CenterModelConfig &config, std::uint64_t seed = 0);
  CenterModel(const CenterModel &) = delete;
  CenterModel &operator=(const CenterModel &) = delete;

  Representations representations(const GraphBatch &g, const tensor::Tensor &h) const;
  Logits forward(const GraphBatch &g, std::mt19937_64 *train_rng = nullptr) const;

  // Sum of binary cross-entropies over every atom and bond of the batch.
  tensor::Tensor loss(const GraphBatch &g, std::span<const reaction::CenterLabel> labels,
                      std::mt19937_64 *train_rng = nullptr) const;

  CenterPrediction predict(const chem::MolGraph &product) const;
  std::vector<CenterDecomposition> topk_centers(const chem::MolGraph &product, int k) const;

  const CenterModelConfig &config() const { return config_; }
  tensor::ParameterStore &params() { return params_; }
  const tensor::ParameterStore &params() const { return params_; }
  const DrgatStack &gnn() const { return gnn_; }

private:
  CenterModelConfig config_;
  tensor::ParameterStore params_;
  DrgatStack gnn_;
  Mlp atom_head_;
  Mlp bond_head_;
};

// Targets laid out like Logits: 1 for centers, 0 elsewhere.
tensor::Matrix atom_targets(const GraphBatch &g, std::span<const reaction::CenterLabel> labels);
tensor::Matrix bond_targets(const GraphBatch &g, std::span<const reaction::CenterLabel> labels);

}  // namespace semiretro::model

#endif  // SEMIRETRO_MODEL_CENTER_MODEL_H_
