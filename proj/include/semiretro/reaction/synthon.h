//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_REACTION_SYNTHON_H_
#define SEMIRETRO_REACTION_SYNTHON_H_

#include <string>
#include <string_view>
#include <vector>

#include "semiretro/chem/mol_graph.h"
#include "semiretro/reaction/reaction.h"

namespace semiretro::reaction {

struct Synthon {
  // Hydrogen counts frozen at their product values; atoms of the reaction
  // atom set carry `attachment`, cut bonds show up as `open_valence`.
  chem::MolGraph graph;
  // Product atom index of each synthon atom.
  std::vector<int> product_atoms;
  std::string origin;
  // Primary dual (first synthon linked by a cut bond); self for singletons.
  int dual = -1;
  // Every synthon sharing a cut bond with this one, ascending.
  std::vector<int> linked;

  std::vector<int> attachment_atoms() const;
};

// Removes the bond centers and flags center atoms. Synthons are ordered by
// their smallest product atom index.
std::vector<Synthon> break_into_synthons(const chem::MolGraph &product,
                                         const CenterLabel &label,
                                         std::string_view origin = {});

// Order-free identity of a decomposition: sorted canonical SMILES of the
// synthons, each atom tagged with its product index. Equal keys mean the
// same product split with the same attachment atoms.
std::string synthon_set_key(const std::vector<Synthon> &synthons);

}  // namespace semiretro::reaction

#endif  // SEMIRETRO_REACTION_SYNTHON_H_
