//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/reaction/template_library.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "semiretro/chem/match.h"

namespace semiretro::reaction {
namespace {

using nlohmann::json;

constexpr int kLibraryVersion = 1;

struct RankedKey {
  std::string key;
  std::size_t count;
};

// Descending count, then ascending key.
std::vector<RankedKey> rank_keys(const std::unordered_map<std::string, std::size_t> &counts) {
  std::vector<RankedKey> out;
  out.reserve(counts.size());
  for (const auto &[k, c]: counts)
    out.push_back({ k, c });
  std::sort(out.begin(), out.end(), [](const RankedKey &a, const RankedKey &b) {
    if (a.count != b.count)
      return a.count > b.count;
    return a.key < b.key;
  });
  return out;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

bool DecomposedReaction::fully_extracted() const {
  if (!labeled() || templates.empty())
    return false;
  return std::all_of(templates.begin(), templates.end(),
                     [](const SynthonTemplate &t) { return t.ok(); });
}

std::string DecomposedReaction::full_template_key() const {
  if (!fully_extracted())
    return {};
  std::vector<std::string> keys;
  for (const auto &t: templates)
    keys.push_back(t.tpl->key());
  std::sort(keys.begin(), keys.end());
  std::string out;
  for (std::size_t i = 0; i < keys.size(); ++i)
    out += (i ? " + " : "") + keys[i];
  return out;
}

DecomposedReaction decompose_reaction(const Reaction &rxn, bool verify) {
  DecomposedReaction out;
  out.id = rxn.id;
  try {
    out.label = label_centers(rxn);
  } catch (const ReactionError &e) {
    out.label_failure = TemplateFailure::kLabelError;
    out.label_detail = e.what();
    return out;
  }
  out.synthons = break_into_synthons(rxn.product, out.label, rxn.id);
  out.templates.resize(out.synthons.size());

  std::unordered_map<int, int> reactant_of_map;
  for (int r = 0; r < static_cast<int>(rxn.reactants.size()); ++r) {
    for (const chem::Atom &a: rxn.reactants[r].atoms()) {
      if (a.atom_map > 0)
        reactant_of_map[a.atom_map] = r;
    }
  }

  std::vector<int> users(rxn.reactants.size(), 0);
  for (std::size_t i = 0; i < out.synthons.size(); ++i) {
    std::set<int> owners;
    for (const chem::Atom &a: out.synthons[i].graph.atoms())
      owners.insert(reactant_of_map.at(a.atom_map));
    SynthonTemplate &st = out.templates[i];
    if (owners.size() != 1) {
      st.failure = TemplateFailure::kSpansReactants;
      st.detail = "synthon atoms come from several reactants";
      continue;
    }
    st.reactant = *owners.begin();
    ++users[st.reactant];
  }

  for (std::size_t i = 0; i < out.synthons.size(); ++i) {
    SynthonTemplate &st = out.templates[i];
    if (!st.ok())
      continue;
    if (users[st.reactant] > 1) {
      st.failure = TemplateFailure::kSharedReactant;
      st.detail = "reactant shared by several synthons";
      continue;
    }
    const chem::MolGraph &reactant = rxn.reactants[st.reactant];
    try {
      st.tpl = extract_semi_template(out.synthons[i], reactant);
      if (verify) {
        const chem::MolGraph rebuilt = apply_semi_template(out.synthons[i], *st.tpl);
        if (!chem::is_isomorphic(rebuilt, reactant)) {
          st.failure = TemplateFailure::kRoundTripMismatch;
          st.detail = "rebuilt reactant differs";
        }
      }
    } catch (const TemplateError &e) {
      st.failure = e.cause();
      st.detail = e.what();
    }
    if (!st.ok())
      st.tpl.reset();
  }
  return out;
}

TemplateLibrary TemplateLibrary::build(const std::vector<DecomposedReaction> &data,
                                       int k) {
  TemplateLibrary lib;
  lib.k_ = k;

  std::unordered_map<std::string, std::size_t> counts, full_counts;
  std::unordered_map<std::string, const SemiTemplate *> sample;
  for (const auto &rxn: data) {
    for (const auto &t: rxn.templates) {
      if (t.ok()) {
        ++counts[t.tpl->key()];
        sample.emplace(t.tpl->key(), &*t.tpl);
      }
    }
    const std::string full = rxn.full_template_key();
    if (!full.empty())
      ++full_counts[full];
  }

  const auto ranked = rank_keys(counts);
  std::unordered_map<std::string, int> rank_of;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    rank_of[ranked[i].key] = static_cast<int>(i) + 1;
    lib.distinct_frequencies_.push_back(ranked[i].count);
    if (static_cast<int>(i) < k) {
      lib.entries_.push_back({ static_cast<int>(i) + 1, ranked[i].count,
                               *sample.at(ranked[i].key) });
      lib.class_of_key_[ranked[i].key] = static_cast<int>(i) + 1;
    }
  }
  for (const auto &f: rank_keys(full_counts))
    lib.full_frequencies_.push_back(f.count);

  for (const auto &rxn: data) {
    int worst = rxn.templates.empty() ? 0 : 1;
    if (!rxn.labeled())
      worst = 0;
    for (const auto &t: rxn.templates) {
      const int r = t.ok() ? rank_of.at(t.tpl->key()) : 0;
      lib.synthon_rank_.push_back(r);
      worst = (r == 0 || worst == 0) ? 0 : std::max(worst, r);
    }
    lib.reaction_worst_rank_.push_back(worst);

    const std::vector<int> classes = lib.classes_of(rxn);
    for (std::size_t i = 0; i < rxn.synthons.size(); ++i) {
      for (int j: rxn.synthons[i].linked) {
        if (j <= static_cast<int>(i))
          continue;
        const int a = std::min(classes[i], classes[j]);
        const int b = std::max(classes[i], classes[j]);
        ++lib.pair_prior_[{ a, b }];
      }
    }
  }
  return lib;
}

int TemplateLibrary::class_of(std::string_view key) const {
  const auto it = class_of_key_.find(std::string(key));
  return it == class_of_key_.end() ? other_class() : it->second;
}

const SemiTemplate *TemplateLibrary::find(int class_id) const {
  if (class_id < 1 || class_id > static_cast<int>(entries_.size()))
    return nullptr;
  return &entries_[class_id - 1].tpl;
}

std::vector<int> TemplateLibrary::classes_of(const DecomposedReaction &rxn) const {
  std::vector<int> out;
  for (const auto &t: rxn.templates)
    out.push_back(t.ok() ? class_of(t.tpl->key()) : other_class());
  return out;
}

std::size_t TemplateLibrary::pair_count(int a, int b) const {
  const auto it = pair_prior_.find({ std::min(a, b), std::max(a, b) });
  return it == pair_prior_.end() ? 0 : it->second;
}

double TemplateLibrary::reaction_coverage(int k) const {
  if (reaction_worst_rank_.empty())
    return 0.0;
  std::size_t hit = 0;
  for (int r: reaction_worst_rank_)
    hit += r > 0 && r <= k;
  return static_cast<double>(hit) / static_cast<double>(reaction_worst_rank_.size());
}

double TemplateLibrary::synthon_coverage(int k) const {
  if (synthon_rank_.empty())
    return 0.0;
  std::size_t hit = 0;
  for (int r: synthon_rank_)
    hit += r > 0 && r <= k;
  return static_cast<double>(hit) / static_cast<double>(synthon_rank_.size());
}

std::vector<CoveragePoint> TemplateLibrary::coverage_curve() const {
  std::vector<CoveragePoint> out;
  const int n = static_cast<int>(distinct_frequencies_.size());
  // Running counts instead of rescanning per k.
  std::vector<std::size_t> reactions_at(n + 2, 0), synthons_at(n + 2, 0);
  for (int r: reaction_worst_rank_) {
    if (r > 0)
      ++reactions_at[r];
  }
  for (int r: synthon_rank_) {
    if (r > 0)
      ++synthons_at[r];
  }
  std::size_t rc = 0, sc = 0;
  const double nr = std::max<std::size_t>(1, reaction_worst_rank_.size());
  const double ns = std::max<std::size_t>(1, synthon_rank_.size());
  for (int k = 1; k <= n; ++k) {
    rc += reactions_at[k];
    sc += synthons_at[k];
    out.push_back({ k, static_cast<double>(rc) / nr, static_cast<double>(sc) / ns });
  }
  return out;
}

std::vector<double> TemplateLibrary::full_template_curve() const {
  std::vector<double> out;
  const double nr = std::max<std::size_t>(1, reaction_worst_rank_.size());
  std::size_t acc = 0;
  for (std::size_t f: full_frequencies_) {
    acc += f;
    out.push_back(static_cast<double>(acc) / nr);
  }
  return out;
}

std::string TemplateLibrary::to_json() const {
  json j;
  j["format"] = "semiretro-template-library";
  j["version"] = kLibraryVersion;
  j["k"] = k_;
  j["other_class"] = other_class();
  json templates = json::array();
  for (const auto &e: entries_) {
    templates.push_back({
        { "class_id", e.class_id },
        { "key", e.tpl.key() },
        { "pattern", e.tpl.pattern_smiles() },
        { "residual", e.tpl.residual_smiles() },
        { "edits", e.tpl.edits_string() },
        { "frequency", e.frequency },
    });
  }
  j["templates"] = std::move(templates);
  json prior = json::array();
  for (const auto &[pair, count]: pair_prior_)
    prior.push_back({ { "a", pair.first }, { "b", pair.second }, { "count", count } });
  j["pair_prior"] = std::move(prior);
  j["stats"] = {
    { "distinct_frequencies", distinct_frequencies_ },
    { "full_template_frequencies", full_frequencies_ },
    { "synthon_rank", synthon_rank_ },
    { "reaction_worst_rank", reaction_worst_rank_ },
  };
  return j.dump(1);
}

TemplateLibrary TemplateLibrary::from_json(std::string_view text) {
  TemplateLibrary lib;
  try {
    const json j = json::parse(text);
    if (j.at("format") != "semiretro-template-library")
      throw std::runtime_error("not a template library");
    if (j.at("version").get<int>() != kLibraryVersion)
      throw std::runtime_error("unsupported template library version");
    lib.k_ = j.at("k").get<int>();
    for (const auto &t: j.at("templates")) {
      TemplateEntry e;
      e.class_id = t.at("class_id").get<int>();
      e.frequency = t.at("frequency").get<std::size_t>();
      e.tpl = SemiTemplate::from_key(t.at("key").get<std::string>());
      if (e.class_id != static_cast<int>(lib.entries_.size()) + 1)
        throw std::runtime_error("template classes must be consecutive");
      lib.class_of_key_[e.tpl.key()] = e.class_id;
      lib.entries_.push_back(std::move(e));
    }
    for (const auto &p: j.at("pair_prior"))
      lib.pair_prior_[{ p.at("a").get<int>(), p.at("b").get<int>() }] =
          p.at("count").get<std::size_t>();
    const json &s = j.at("stats");
    lib.distinct_frequencies_ = s.at("distinct_frequencies").get<std::vector<std::size_t>>();
    lib.full_frequencies_ = s.at("full_template_frequencies").get<std::vector<std::size_t>>();
    lib.synthon_rank_ = s.at("synthon_rank").get<std::vector<int>>();
    lib.reaction_worst_rank_ = s.at("reaction_worst_rank").get<std::vector<int>>();
  } catch (const json::exception &e) {
    throw std::runtime_error(std::string("template library: ") + e.what());
  }
  return lib;
}

void TemplateLibrary::save(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path);
  out << to_json() << '\n';
}

TemplateLibrary TemplateLibrary::load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::vector<CoveragePoint> coverage_stats(const TemplateLibrary &lib) {
  return lib.coverage_curve();
}

std::string coverage_csv(const TemplateLibrary &lib) {
  std::string out = "k,reaction_coverage,synthon_coverage,full_template_coverage\n";
  const auto curve = lib.coverage_curve();
  const auto full = lib.full_template_curve();
  for (const auto &p: curve) {
    const double f = full.empty() ? 0.0
                                  : full[std::min<std::size_t>(p.k, full.size()) - 1];
    out += std::to_string(p.k) + "," + fixed(p.reaction_coverage) + ","
           + fixed(p.synthon_coverage) + "," + fixed(f) + "\n";
  }
  return out;
}

}  // namespace semiretro::reaction
