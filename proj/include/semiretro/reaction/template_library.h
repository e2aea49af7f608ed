//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_REACTION_TEMPLATE_LIBRARY_H_
#define SEMIRETRO_REACTION_TEMPLATE_LIBRARY_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semiretro/reaction/reaction.h"
#include "semiretro/reaction/semi_template.h"
#include "semiretro/reaction/synthon.h"

namespace semiretro::reaction {

struct SynthonTemplate {
  std::optional<SemiTemplate> tpl;
  TemplateFailure failure = TemplateFailure::kNone;
  std::string detail;
  int reactant = -1;  // index into Reaction::reactants

  bool ok() const { return failure == TemplateFailure::kNone; }
};

// Centers, synthons and per-synthon templates of one reaction.
struct DecomposedReaction {
  std::string id;
  CenterLabel label;
  TemplateFailure label_failure = TemplateFailure::kNone;
  std::string label_detail;
  std::vector<Synthon> synthons;
  std::vector<SynthonTemplate> templates;

  bool labeled() const { return label_failure == TemplateFailure::kNone; }
  bool fully_extracted() const;
  // Sorted semi-template keys joined by " + "; empty unless fully extracted.
  std::string full_template_key() const;
};

// Labels centers, splits the product and extracts one template per synthon.
// With `verify`, a template that does not rebuild its reactant is recorded
// as a round-trip failure.
DecomposedReaction decompose_reaction(const Reaction &rxn, bool verify = true);

struct TemplateEntry {
  int class_id = 0;  // 1..K
  std::size_t frequency = 0;
  SemiTemplate tpl;
};

struct CoveragePoint {
  int k = 0;
  double reaction_coverage = 0.0;  // every synthon's template within top-k
  double synthon_coverage = 0.0;
};

class TemplateLibrary {
public:
  static constexpr int kDefaultK = 150;

  TemplateLibrary() = default;

  // Top-k templates by frequency (ties by key); everything else is class
  // k + 1.
  static TemplateLibrary build(const std::vector<DecomposedReaction> &data,
                               int k = kDefaultK);

  int k() const { return k_; }
  int other_class() const { return k_ + 1; }
  int num_classes() const { return k_ + 1; }

  const std::vector<TemplateEntry> &entries() const { return entries_; }
  // Library class of a template key; other_class() when not in the top k.
  int class_of(std::string_view key) const;
  // nullptr for the uncovered class or ids out of range.
  const SemiTemplate *find(int class_id) const;

  // Class per synthon; failed extractions map to other_class().
  std::vector<int> classes_of(const DecomposedReaction &rxn) const;

  std::size_t pair_count(int a, int b) const;
  const std::map<std::pair<int, int>, std::size_t> &pair_prior() const {
    return pair_prior_;
  }

  // Training statistics kept for coverage reporting.
  std::size_t num_reactions() const { return reaction_worst_rank_.size(); }
  std::size_t num_synthons() const { return synthon_rank_.size(); }
  std::size_t num_distinct() const { return distinct_frequencies_.size(); }

  // Cumulative coverage for k = 1..number of distinct semi-templates.
  std::vector<CoveragePoint> coverage_curve() const;
  // Reaction coverage of the top-k whole-reaction templates (each the
  // combination of a reaction's semi-templates), k = 1..distinct count.
  std::vector<double> full_template_curve() const;
  double reaction_coverage(int k) const;
  double synthon_coverage(int k) const;

  std::string to_json() const;
  static TemplateLibrary from_json(std::string_view text);
  void save(const std::string &path) const;
  static TemplateLibrary load(const std::string &path);

private:
  int k_ = kDefaultK;
  std::vector<TemplateEntry> entries_;
  std::unordered_map<std::string, int> class_of_key_;
  std::map<std::pair<int, int>, std::size_t> pair_prior_;

  std::vector<std::size_t> distinct_frequencies_;
  std::vector<std::size_t> full_frequencies_;
  // 1-based frequency rank of each training synthon's template (0 = none).
  std::vector<int> synthon_rank_;
  // Worst synthon rank per training reaction (0 = not extractable).
  std::vector<int> reaction_worst_rank_;
};

// Coverage table written as CSV rows "k,reaction_coverage,synthon_coverage".
std::vector<CoveragePoint> coverage_stats(const TemplateLibrary &lib);
std::string coverage_csv(const TemplateLibrary &lib);

}  // namespace semiretro::reaction

#endif  // SEMIRETRO_REACTION_TEMPLATE_LIBRARY_H_
