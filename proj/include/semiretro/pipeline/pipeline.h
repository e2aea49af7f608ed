//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_PIPELINE_PIPELINE_H_
#define SEMIRETRO_PIPELINE_PIPELINE_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "semiretro/model/center_model.h"
#include "semiretro/model/synthon_model.h"
#include "semiretro/reaction/template_library.h"

namespace semiretro::pipeline {

inline constexpr int kDefaultKsArray[] = { 1, 3, 5, 10 };
inline constexpr std::span<const int> kDefaultKs { kDefaultKsArray };

// Ranked center candidates for a product, best first.
class CenterPredictor {
public:
  virtual ~CenterPredictor() = default;
  virtual std::vector<model::CenterCandidate> rank(const chem::MolGraph &product) const = 0;
};

// Template class distribution (index c - 1 for class c) per synthon.
class SynthonPredictor {
public:
  virtual ~SynthonPredictor() = default;
  virtual int num_classes() const = 0;
  virtual std::vector<std::vector<double>> distributions(
      const chem::MolGraph &product, const reaction::CenterLabel &label,
      const std::vector<reaction::Synthon> &synthons) const = 0;
};

class ModelCenterPredictor: public CenterPredictor {
public:
  explicit ModelCenterPredictor(const model::CenterModel &m): model_(&m) { }
  std::vector<model::CenterCandidate> rank(const chem::MolGraph &product) const override;

private:
  const model::CenterModel *model_;
};

// Uses the refined distributions (the first head's when correction is off).
class ModelSynthonPredictor: public SynthonPredictor {
public:
  explicit ModelSynthonPredictor(const model::SynthonModel &m): model_(&m) { }
  int num_classes() const override { return model_->config().num_classes; }
  std::vector<std::vector<double>> distributions(
      const chem::MolGraph &product, const reaction::CenterLabel &label,
      const std::vector<reaction::Synthon> &synthons) const override;

private:
  const model::SynthonModel *model_;
};

// Ground-truth stubs keyed by the atom-mapped canonical product SMILES: the
// true centers with probability 1 and one-hot true template classes.
class OracleCenterPredictor: public CenterPredictor {
public:
  OracleCenterPredictor(std::span<const reaction::Reaction> reactions,
                        std::span<const reaction::DecomposedReaction> data);
  std::vector<model::CenterCandidate> rank(const chem::MolGraph &product) const override;

private:
  std::map<std::string, reaction::CenterLabel> labels_;
};

class OracleSynthonPredictor: public SynthonPredictor {
public:
  OracleSynthonPredictor(std::span<const reaction::Reaction> reactions,
                         std::span<const reaction::DecomposedReaction> data,
                         const reaction::TemplateLibrary &library);
  int num_classes() const override { return num_classes_; }
  // Synthons not seen in the data get the uncovered class.
  std::vector<std::vector<double>> distributions(
      const chem::MolGraph &product, const reaction::CenterLabel &label,
      const std::vector<reaction::Synthon> &synthons) const override;

private:
  int num_classes_;
  std::map<std::string, int> classes_;
};

struct PredictOptions {
  int k_ci = 3;
  int k_sc = 4;
  int k_total = 10;
  bool filter = true;  // pair-prior filter on joint template assignments
};

struct RetroCandidate {
  reaction::CenterLabel center;
  double center_prob = 0.0;
  std::vector<int> classes;
  std::vector<double> class_probs;
  // Sorted canonical SMILES of the reactants (no maps, no stereo), joined
  // by ".".
  std::string reactants;
  double prob = 0.0;  // center_prob times every class probability
};

struct RetroPrediction {
  std::string id;
  std::vector<RetroCandidate> candidates;  // probability descending
};

// Probability tree: top k_ci centers x top k_sc joint template assignments,
// optional pair-prior filter, template application (dropping uncovered
// classes and infeasible results), merge of identical reactant sets keeping
// the most probable path, ranking and truncation to k_total.
RetroPrediction predict_reactants(const chem::MolGraph &product, const CenterPredictor &ci,
                                  const SynthonPredictor &sc,
                                  const reaction::TemplateLibrary &library,
                                  const PredictOptions &options);

// Ground-truth reactant set in the same form as RetroCandidate::reactants.
std::string reactant_set_key(const reaction::Reaction &rxn);

// Template round trip holds and every synthon's template is in the top k.
bool round_trippable(const reaction::DecomposedReaction &d,
                     const reaction::TemplateLibrary &library);

struct AccuracyTable {
  std::vector<int> ks;
  std::vector<double> ci;          // synthon-set accuracy of center identification
  std::vector<double> sc;          // teacher-forced synthon completion accuracy
  std::vector<double> end_to_end;  // over every product
  std::vector<double> end_to_end_round_trippable;
  int num_products = 0;
  int num_round_trippable = 0;
};

struct EvaluationOutput {
  AccuracyTable table;
  std::vector<RetroPrediction> predictions;
};

EvaluationOutput evaluate(std::span<const reaction::Reaction> reactions,
                          std::span<const reaction::DecomposedReaction> data,
                          const CenterPredictor &ci, const SynthonPredictor &sc,
                          const reaction::TemplateLibrary &library,
                          const PredictOptions &options, std::span<const int> ks = kDefaultKs);

// CI accuracy over labeled products and SC accuracy from true synthons.
struct SubmoduleTables {
  std::vector<int> ks;
  std::vector<double> ci;
  std::vector<double> sc;
  int ci_products = 0;
  int sc_products = 0;
};
SubmoduleTables evaluate_submodules(std::span<const reaction::Reaction> reactions,
                                    std::span<const reaction::DecomposedReaction> data,
                                    const CenterPredictor &ci, const SynthonPredictor &sc,
                                    const reaction::TemplateLibrary &library, bool filter,
                                    std::span<const int> ks = kDefaultKs);

// "product_id,rank,reactants,prob" rows.
std::string predictions_csv(std::span<const RetroPrediction> predictions);
// "k,ci_accuracy,sc_accuracy,end_to_end_accuracy[,end_to_end_round_trippable]".
std::string metrics_csv(const AccuracyTable &table);

nlohmann::json center_prediction_json(const model::CenterPrediction &p, int k);
nlohmann::json synthon_prediction_json(std::span<const std::vector<double>> dists,
                                       std::span<const model::JointCandidate> joint, int k);

}  // namespace semiretro::pipeline

#endif  // SEMIRETRO_PIPELINE_PIPELINE_H_
