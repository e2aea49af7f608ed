//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/pipeline/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "semiretro/chem/canonical.h"
#include "semiretro/chem/smiles.h"

namespace semiretro::pipeline {

namespace {

std::string product_key(const chem::MolGraph &product) {
  return chem::canonical_smiles(product);
}

// Synthons carry the product's atom maps, so this is unique within a product.
std::string synthon_key(const std::string &product, const reaction::Synthon &s) {
  return product + "|" + chem::canonical_smiles(s.graph);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int max_k(std::span<const int> ks) {
  return ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());
}

void add_hit(std::vector<double> &hits, std::span<const int> ks, int first_hit) {
  for (std::size_t i = 0; i < ks.size(); ++i)
    hits[i] += first_hit >= 0 && first_hit < ks[i] ? 1.0 : 0.0;
}

void normalize(std::vector<double> &hits, int n) {
  for (double &h: hits)
    h = n > 0 ? h / n : 0.0;
}

// Reactants rebuilt from one joint assignment, or empty when any synthon is
// uncovered or a result fails the valence or SMILES round-trip checks.
std::string assemble(const std::vector<reaction::Synthon> &synthons,
                     const std::vector<int> &classes,
                     const reaction::TemplateLibrary &library) {
  std::vector<std::string> keys;
  for (std::size_t s = 0; s < synthons.size(); ++s) {
    const reaction::SemiTemplate *tpl = library.find(classes[s]);
    if (!tpl)
      return {};
    chem::MolGraph reactant;
    try {
      reactant = reaction::apply_semi_template(synthons[s], *tpl);
    } catch (const reaction::TemplateError &) {
      return {};
    }
    for (int a = 0; a < reactant.num_atoms(); ++a) {
      if (!reactant.valence_ok(a))
        return {};
    }
    std::string key = chem::molecule_key(reactant);
    try {
      if (chem::molecule_key(chem::parse_smiles(key)) != key)
        return {};
    } catch (const std::exception &) {
      return {};
    }
    keys.push_back(std::move(key));
  }
  std::sort(keys.begin(), keys.end());
  std::string out;
  for (const std::string &k: keys)
    out += (out.empty() ? "" : ".") + k;
  return out;
}

}  // namespace

std::vector<model::CenterCandidate> ModelCenterPredictor::rank(
    const chem::MolGraph &product) const {
  return model_->predict(product).ranked;
}

std::vector<std::vector<double>> ModelSynthonPredictor::distributions(
    const chem::MolGraph &product, const reaction::CenterLabel &label,
    const std::vector<reaction::Synthon> &synthons) const {
  const model::PreparedProduct prepared = model::prepare_product(product, label, synthons);
  std::vector<std::vector<double>> out;
  for (auto &p: model_->predict(prepared))
    out.push_back(std::move(p.refined));
  return out;
}

OracleCenterPredictor::OracleCenterPredictor(std::span<const reaction::Reaction> reactions,
                                             std::span<const reaction::DecomposedReaction> data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].labeled())
      labels_.emplace(product_key(reactions[i].product), data[i].label);
  }
}

std::vector<model::CenterCandidate> OracleCenterPredictor::rank(
    const chem::MolGraph &product) const {
  const auto it = labels_.find(product_key(product));
  if (it == labels_.end())
    return {};
  return { { it->second, 1.0 } };
}

OracleSynthonPredictor::OracleSynthonPredictor(
    std::span<const reaction::Reaction> reactions,
    std::span<const reaction::DecomposedReaction> data, const reaction::TemplateLibrary &library)
    : num_classes_(library.num_classes()) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data[i].labeled())
      continue;
    const std::string product = product_key(reactions[i].product);
    const std::vector<int> classes = library.classes_of(data[i]);
    for (std::size_t s = 0; s < data[i].synthons.size(); ++s)
      classes_.emplace(synthon_key(product, data[i].synthons[s]), classes[s]);
  }
}

std::vector<std::vector<double>> OracleSynthonPredictor::distributions(
    const chem::MolGraph &product, const reaction::CenterLabel &,
    const std::vector<reaction::Synthon> &synthons) const {
  const std::string pkey = product_key(product);
  std::vector<std::vector<double>> out;
  for (const reaction::Synthon &s: synthons) {
    const auto it = classes_.find(synthon_key(pkey, s));
    const int cls = it == classes_.end() ? num_classes_ : it->second;
    std::vector<double> d(num_classes_, 0.0);
    d[cls - 1] = 1.0;
    out.push_back(std::move(d));
  }
  return out;
}

RetroPrediction predict_reactants(const chem::MolGraph &product, const CenterPredictor &ci,
                                  const SynthonPredictor &sc,
                                  const reaction::TemplateLibrary &library,
                                  const PredictOptions &options) {
  RetroPrediction out;
  const std::vector<model::CenterCandidate> ranked = ci.rank(product);
  std::vector<RetroCandidate> all;
  for (const model::CenterDecomposition &dec: model::decompose_top(product, ranked, options.k_ci)) {
    if (dec.synthons.empty())
      continue;
    const auto dists = sc.distributions(product, dec.label, dec.synthons);
    const auto links = model::synthon_links(dec.synthons);
    const auto joint = model::topk_templates(dists, links, options.k_sc,
                                             options.filter ? &library : nullptr);
    for (const model::JointCandidate &j: joint) {
      std::string reactants = assemble(dec.synthons, j.classes, library);
      if (reactants.empty())
        continue;
      RetroCandidate c;
      c.center = dec.label;
      c.center_prob = dec.prob;
      c.classes = j.classes;
      for (std::size_t s = 0; s < j.classes.size(); ++s)
        c.class_probs.push_back(dists[s][j.classes[s] - 1]);
      c.reactants = std::move(reactants);
      c.prob = dec.prob * j.prob;
      all.push_back(std::move(c));
    }
  }
  // Stable: among equal probabilities the earlier path (better center, then
  // better joint rank) survives the merge.
  std::stable_sort(all.begin(), all.end(), [](const RetroCandidate &a, const RetroCandidate &b) {
    return a.prob > b.prob;
  });
  std::vector<std::string> seen;
  for (RetroCandidate &c: all) {
    if (std::find(seen.begin(), seen.end(), c.reactants) != seen.end())
      continue;
    seen.push_back(c.reactants);
    out.candidates.push_back(std::move(c));
    if (static_cast<int>(out.candidates.size()) == options.k_total)
      break;
  }
  return out;
}

std::string reactant_set_key(const reaction::Reaction &rxn) {
  std::vector<std::string> keys;
  for (const chem::MolGraph &r: rxn.reactants)
    keys.push_back(chem::molecule_key(r));
  std::sort(keys.begin(), keys.end());
  std::string out;
  for (const std::string &k: keys)
    out += (out.empty() ? "" : ".") + k;
  return out;
}

bool round_trippable(const reaction::DecomposedReaction &d,
                     const reaction::TemplateLibrary &library) {
  if (!d.fully_extracted())
    return false;
  const std::vector<int> classes = library.classes_of(d);
  return std::none_of(classes.begin(), classes.end(),
                      [&](int c) { return c == library.other_class(); });
}

SubmoduleTables evaluate_submodules(std::span<const reaction::Reaction> reactions,
                                    std::span<const reaction::DecomposedReaction> data,
                                    const CenterPredictor &ci, const SynthonPredictor &sc,
                                    const reaction::TemplateLibrary &library, bool filter,
                                    std::span<const int> ks) {
  SubmoduleTables t;
  t.ks.assign(ks.begin(), ks.end());
  t.ci.assign(ks.size(), 0.0);
  t.sc.assign(ks.size(), 0.0);
  const int kmax = max_k(ks);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const reaction::DecomposedReaction &d = data[i];
    if (!d.labeled() || d.synthons.empty())
      continue;
    const chem::MolGraph &product = reactions[i].product;

    const std::string truth = reaction::synthon_set_key(d.synthons);
    const auto ranked = ci.rank(product);
    const auto top = model::decompose_top(product, ranked, kmax);
    int hit = -1;
    for (std::size_t r = 0; r < top.size() && hit < 0; ++r) {
      if (reaction::synthon_set_key(top[r].synthons) == truth)
        hit = static_cast<int>(r);
    }
    add_hit(t.ci, ks, hit);
    ++t.ci_products;

    const std::vector<int> classes = library.classes_of(d);
    const auto dists = sc.distributions(product, d.label, d.synthons);
    const auto joint = model::topk_templates(dists, model::synthon_links(d.synthons), kmax,
                                             filter ? &library : nullptr);
    hit = -1;
    for (std::size_t r = 0; r < joint.size() && hit < 0; ++r) {
      if (joint[r].classes == classes)
        hit = static_cast<int>(r);
    }
    add_hit(t.sc, ks, hit);
    ++t.sc_products;
  }
  normalize(t.ci, t.ci_products);
  normalize(t.sc, t.sc_products);
  return t;
}

EvaluationOutput evaluate(std::span<const reaction::Reaction> reactions,
                          std::span<const reaction::DecomposedReaction> data,
                          const CenterPredictor &ci, const SynthonPredictor &sc,
                          const reaction::TemplateLibrary &library,
                          const PredictOptions &options, std::span<const int> ks) {
  EvaluationOutput out;
  AccuracyTable &t = out.table;
  const SubmoduleTables sub =
      evaluate_submodules(reactions, data, ci, sc, library, options.filter, ks);
  t.ks = sub.ks;
  t.ci = sub.ci;
  t.sc = sub.sc;
  t.end_to_end.assign(ks.size(), 0.0);
  t.end_to_end_round_trippable.assign(ks.size(), 0.0);
  for (std::size_t i = 0; i < reactions.size(); ++i) {
    RetroPrediction pred = predict_reactants(reactions[i].product, ci, sc, library, options);
    pred.id = reactions[i].id;
    const std::string truth = reactant_set_key(reactions[i]);
    int hit = -1;
    for (std::size_t r = 0; r < pred.candidates.size() && hit < 0; ++r) {
      if (pred.candidates[r].reactants == truth)
        hit = static_cast<int>(r);
    }
    add_hit(t.end_to_end, ks, hit);
    ++t.num_products;
    if (i < data.size() && round_trippable(data[i], library)) {
      add_hit(t.end_to_end_round_trippable, ks, hit);
      ++t.num_round_trippable;
    }
    out.predictions.push_back(std::move(pred));
  }
  normalize(t.end_to_end, t.num_products);
  normalize(t.end_to_end_round_trippable, t.num_round_trippable);
  return out;
}

std::string predictions_csv(std::span<const RetroPrediction> predictions) {
  std::ostringstream os;
  os << "product_id,rank,reactants,prob\n";
  for (const RetroPrediction &p: predictions) {
    for (std::size_t r = 0; r < p.candidates.size(); ++r)
      os << p.id << ',' << r + 1 << ',' << p.candidates[r].reactants << ','
         << format_double(p.candidates[r].prob) << '\n';
  }
  return os.str();
}

std::string metrics_csv(const AccuracyTable &t) {
  std::ostringstream os;
  os << "k,ci_accuracy,sc_accuracy,end_to_end_accuracy,end_to_end_round_trippable\n";
  for (std::size_t i = 0; i < t.ks.size(); ++i)
    os << t.ks[i] << ',' << format_double(t.ci[i]) << ',' << format_double(t.sc[i]) << ','
       << format_double(t.end_to_end[i]) << ',' << format_double(t.end_to_end_round_trippable[i])
       << '\n';
  return os.str();
}

nlohmann::json center_prediction_json(const model::CenterPrediction &p, int k) {
  nlohmann::json top = nlohmann::json::array();
  for (int i = 0; i < k && i < static_cast<int>(p.ranked.size()); ++i) {
    const model::CenterCandidate &c = p.ranked[i];
    nlohmann::json bonds = nlohmann::json::array();
    for (const auto &[a, b]: c.label.bond_centers)
      bonds.push_back({ a, b });
    top.push_back({ { "atoms", c.label.atom_centers }, { "bonds", bonds }, { "prob", c.prob } });
  }
  return { { "atom_probs", p.atom_probs }, { "bond_probs", p.bond_probs }, { "top", top } };
}

nlohmann::json synthon_prediction_json(std::span<const std::vector<double>> dists,
                                       std::span<const model::JointCandidate> joint, int k) {
  nlohmann::json synthons = nlohmann::json::array();
  for (const auto &d: dists) {
    std::vector<int> idx(d.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] > d[b]; });
    nlohmann::json top = nlohmann::json::array();
    for (int i = 0; i < k && i < static_cast<int>(idx.size()); ++i)
      top.push_back({ { "class", idx[i] + 1 }, { "prob", d[idx[i]] } });
    synthons.push_back({ { "top", top } });
  }
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < k && i < static_cast<int>(joint.size()); ++i)
    j.push_back({ { "classes", joint[i].classes }, { "prob", joint[i].prob } });
  return { { "synthons", synthons }, { "joint", j } };
}

}  // namespace semiretro::pipeline
