//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_PIPELINE_TRAIN_H_
#define SEMIRETRO_PIPELINE_TRAIN_H_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "semiretro/model/center_model.h"
#include "semiretro/model/synthon_model.h"
#include "semiretro/reaction/template_library.h"

namespace semiretro::pipeline {

// Ground-truth center identification example.
struct CiExample {
  std::string id;
  chem::MolGraph product;
  model::GraphFeatures features;
  reaction::CenterLabel label;
  std::string synthon_key;  // reaction::synthon_set_key of the true split
};

// Ground-truth synthon completion example (teacher-forced decomposition).
struct ScExample {
  std::string id;
  model::PreparedProduct prepared;
  std::vector<int> classes;  // library class per synthon
  std::vector<std::pair<int, int>> links;
};

// Reactions whose centers could be labeled.
std::vector<CiExample> make_ci_examples(std::span<const reaction::DecomposedReaction> data,
                                        std::span<const reaction::Reaction> reactions);
std::vector<ScExample> make_sc_examples(std::span<const reaction::DecomposedReaction> data,
                                        std::span<const reaction::Reaction> reactions,
                                        const reaction::TemplateLibrary &library);

struct TrainOptions {
  int epochs = 30;
  int batch_size = 128;
  double max_lr = 1e-3;
  std::uint64_t seed = 0;
  // Called after every epoch with the summed training loss of that epoch.
  std::function<void(int epoch, double loss)> on_epoch;
  // Stops early once this returns true (checked after on_epoch).
  std::function<bool(int epoch)> stop;
};

struct TrainReport {
  std::vector<double> epoch_loss;
  std::int64_t steps = 0;
};

// Deterministic Fisher-Yates permutation from raw engine output.
std::vector<int> shuffled_indices(int n, std::mt19937_64 &rng);

// Adam with a one-cycle schedule over epochs * batches steps.
TrainReport train_center_model(model::CenterModel &m, std::span<const CiExample> data,
                               const TrainOptions &options);
TrainReport train_synthon_model(model::SynthonModel &m, std::span<const ScExample> data,
                                const TrainOptions &options);

// Top-k accuracy of center identification: a hit when one of the first k
// single-center candidates induces the true synthon set.
std::vector<double> center_accuracy(const model::CenterModel &m, std::span<const CiExample> data,
                                    std::span<const int> ks);
// Top-k accuracy of synthon completion from true synthons: a hit when one of
// the first k joint assignments gets every synthon's class right.
std::vector<double> synthon_accuracy(const model::SynthonModel &m, std::span<const ScExample> data,
                                     std::span<const int> ks,
                                     const reaction::TemplateLibrary *prior);

}  // namespace semiretro::pipeline

#endif  // SEMIRETRO_PIPELINE_TRAIN_H_
