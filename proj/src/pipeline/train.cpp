//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/pipeline/train.h"

#include <algorithm>
#include <numeric>

#include "semiretro/tensor/optim.h"

namespace semiretro::pipeline {

using tensor::Tensor;

std::vector<CiExample> make_ci_examples(std::span<const reaction::DecomposedReaction> data,
                                        std::span<const reaction::Reaction> reactions) {
  std::vector<CiExample> out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data[i].labeled())
      continue;
    CiExample ex;
    ex.id = data[i].id;
    ex.product = reactions[i].product;
    ex.features = model::featurize(ex.product);
    ex.label = data[i].label;
    ex.synthon_key = reaction::synthon_set_key(data[i].synthons);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<ScExample> make_sc_examples(std::span<const reaction::DecomposedReaction> data,
                                        std::span<const reaction::Reaction> reactions,
                                        const reaction::TemplateLibrary &library) {
  std::vector<ScExample> out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data[i].labeled() || data[i].synthons.empty())
      continue;
    ScExample ex;
    ex.id = data[i].id;
    ex.prepared = model::prepare_product(reactions[i].product, data[i].label, data[i].synthons);
    ex.classes = library.classes_of(data[i]);
    ex.links = model::synthon_links(data[i].synthons);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<int> shuffled_indices(int n, std::mt19937_64 &rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

namespace {

// Shared epoch/batch loop; `batch_loss` builds the loss of one batch.
template <class Example, class Model, class BatchLoss>
TrainReport run_training(Model &m, std::span<const Example> data, const TrainOptions &options,
                         BatchLoss batch_loss) {
  TrainReport report;
  if (data.empty() || options.epochs <= 0)
    return report;
  const int n = static_cast<int>(data.size());
  const int batch = std::max(1, options.batch_size);
  const int per_epoch = (n + batch - 1) / batch;
  tensor::OneCycleSchedule schedule;
  schedule.max_lr = options.max_lr;
  schedule.total_steps = static_cast<std::int64_t>(per_epoch) * options.epochs;
  tensor::Adam adam(m.params());
  std::mt19937_64 rng(options.seed);
  // Dropout masks draw from their own stream so the batch order does not
  // depend on the rate.
  std::mt19937_64 dropout_rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const std::vector<int> order = shuffled_indices(n, rng);
    double total = 0.0;
    for (int start = 0; start < n; start += batch) {
      std::vector<const Example *> items;
      for (int i = start; i < std::min(n, start + batch); ++i)
        items.push_back(&data[order[i]]);
      m.params().zero_grad();
      tensor::Tape tape;
      tensor::TapeScope scope(tape);
      const Tensor loss = batch_loss(items, &dropout_rng);
      total += loss.item();
      tape.backward(loss);
      adam.step(schedule.lr(report.steps));
      ++report.steps;
    }
    report.epoch_loss.push_back(total);
    if (options.on_epoch)
      options.on_epoch(epoch, total);
    if (options.stop && options.stop(epoch))
      break;
  }
  return report;
}

}  // namespace

TrainReport train_center_model(model::CenterModel &m, std::span<const CiExample> data,
                               const TrainOptions &options) {
  return run_training(m, data, options, [&](const std::vector<const CiExample *> &items,
                                            std::mt19937_64 *drop) {
    std::vector<const model::GraphFeatures *> graphs;
    std::vector<reaction::CenterLabel> labels;
    for (const CiExample *ex: items) {
      graphs.push_back(&ex->features);
      labels.push_back(ex->label);
    }
    return m.loss(model::make_batch(graphs), labels, drop);
  });
}

TrainReport train_synthon_model(model::SynthonModel &m, std::span<const ScExample> data,
                                const TrainOptions &options) {
  return run_training(m, data, options, [&](const std::vector<const ScExample *> &items,
                                            std::mt19937_64 *drop) {
    std::vector<const model::PreparedProduct *> batch;
    std::vector<std::vector<int>> labels;
    for (const ScExample *ex: items) {
      batch.push_back(&ex->prepared);
      labels.push_back(ex->classes);
    }
    return m.loss(batch, labels, drop);
  });
}

std::vector<double> center_accuracy(const model::CenterModel &m, std::span<const CiExample> data,
                                    std::span<const int> ks) {
  std::vector<double> hits(ks.size(), 0.0);
  if (data.empty())
    return hits;
  const int kmax = ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());
  for (const CiExample &ex: data) {
    const auto top = m.topk_centers(ex.product, kmax);
    int first_hit = -1;
    for (std::size_t r = 0; r < top.size() && first_hit < 0; ++r) {
      if (reaction::synthon_set_key(top[r].synthons) == ex.synthon_key)
        first_hit = static_cast<int>(r);
    }
    for (std::size_t i = 0; i < ks.size(); ++i)
      hits[i] += first_hit >= 0 && first_hit < ks[i] ? 1.0 : 0.0;
  }
  for (double &h: hits)
    h /= static_cast<double>(data.size());
  return hits;
}

std::vector<double> synthon_accuracy(const model::SynthonModel &m, std::span<const ScExample> data,
                                     std::span<const int> ks,
                                     const reaction::TemplateLibrary *prior) {
  std::vector<double> hits(ks.size(), 0.0);
  if (data.empty())
    return hits;
  const int kmax = ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());
  for (const ScExample &ex: data) {
    std::vector<std::vector<double>> dists;
    for (const auto &p: m.predict(ex.prepared))
      dists.push_back(p.refined);
    const auto joint = model::topk_templates(dists, ex.links, kmax, prior);
    int first_hit = -1;
    for (std::size_t r = 0; r < joint.size() && first_hit < 0; ++r) {
      if (joint[r].classes == ex.classes)
        first_hit = static_cast<int>(r);
    }
    for (std::size_t i = 0; i < ks.size(); ++i)
      hits[i] += first_hit >= 0 && first_hit < ks[i] ? 1.0 : 0.0;
  }
  for (double &h: hits)
    h /= static_cast<double>(data.size());
  return hits;
}

}  // namespace semiretro::pipeline
