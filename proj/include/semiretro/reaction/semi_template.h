//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_REACTION_SEMI_TEMPLATE_H_
#define SEMIRETRO_REACTION_SEMI_TEMPLATE_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "semiretro/chem/mol_graph.h"
#include "semiretro/reaction/synthon.h"

namespace semiretro::reaction {

enum class TemplateFailure {
  kNone,
  kLabelError,
  kUnmappedSynthonAtom,
  kMissingInReactant,
  kSpansReactants,
  kSharedReactant,
  kInconsistentReactant,
  kPatternMismatch,
  kInfeasible,
  kRoundTripMismatch,
  kMalformedTemplate,
};

std::string_view failure_name(TemplateFailure failure);

class TemplateError: public std::runtime_error {
public:
  TemplateError(TemplateFailure cause, const std::string &what)
      : std::runtime_error(what), cause_(cause) { }

  TemplateFailure cause() const { return cause_; }

private:
  TemplateFailure cause_;
};

// How one matched synthon atom changes on the way back to the reactant.
struct PatternAtom {
  int element = 0;  // 0 = any element
  bool aromatic = false;  // compared only when element is recorded
  int open_valence = 0;
  bool attachment = false;
  int charge_delta = 0;
  // Hydrogen change beyond restoring the open valence and paying for the new
  // residual and edited bonds.
  int h_delta = 0;
  int aromatic_after = -1;  // -1 keeps the flag

  bool operator==(const PatternAtom &) const = default;
};

// Bond added between two pattern atoms (ordinals, a < b).
struct BondEdit {
  int a = 0;
  int b = 0;
  chem::BondOrder order = chem::BondOrder::kSingle;

  bool operator==(const BondEdit &) const = default;
};

class SemiTemplate {
public:
  SemiTemplate() = default;

  // Parses the canonical serialization produced by key().
  static SemiTemplate from_key(std::string_view key);

  // "<template SMILES>|<atom edits>|<bond edits>"; equal keys mean equal
  // transformations.
  const std::string &key() const { return key_; }

  // Pattern atoms carry atom maps 1..n (their ordinal + 1); residual atoms
  // are unmapped and have frozen hydrogen counts.
  const chem::MolGraph &graph() const { return graph_; }
  const std::vector<PatternAtom> &pattern() const { return pattern_; }
  const std::vector<int> &pattern_index() const { return pattern_index_; }
  const std::vector<BondEdit> &bond_edits() const { return bond_edits_; }

  int residual_atom_count() const {
    return graph_.num_atoms() - static_cast<int>(pattern_.size());
  }
  std::string residual_smiles() const;
  std::string pattern_smiles() const;
  std::string edits_string() const;

  // No residual, no property or bond edits.
  bool is_identity() const;

private:
  chem::MolGraph graph_;
  std::vector<PatternAtom> pattern_;
  std::vector<int> pattern_index_;
  std::vector<BondEdit> bond_edits_;
  std::string key_;

  friend SemiTemplate extract_semi_template(const Synthon &,
                                            const chem::MolGraph &);
};

// Residual plus edits turning `synthon` into `reactant`. Atom maps link the
// two graphs. Throws TemplateError.
SemiTemplate extract_semi_template(const Synthon &synthon,
                                   const chem::MolGraph &reactant);

// Matches the pattern at the synthon's attachment atoms (ties broken by the
// lowest canonical ranks), grafts the residual, applies edits and checks
// valences. Synthon atom maps are kept. Throws TemplateError.
chem::MolGraph apply_semi_template(const Synthon &synthon,
                                   const SemiTemplate &tpl);
chem::MolGraph apply_semi_template(const chem::MolGraph &synthon,
                                   const SemiTemplate &tpl);

}  // namespace semiretro::reaction

#endif  // SEMIRETRO_REACTION_SEMI_TEMPLATE_H_
