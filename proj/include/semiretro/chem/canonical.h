//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_CHEM_CANONICAL_H_
#define SEMIRETRO_CHEM_CANONICAL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "semiretro/chem/mol_graph.h"

namespace semiretro::chem {

struct CanonicalOptions {
  bool atom_maps = true;
  bool stereo = true;
  // Render and distinguish synthon open valence / attachment flags.
  bool synthon_flags = true;
  // Optional per-atom labels that take part in the initial partition.
  std::span<const std::uint64_t> extra_labels = {};
  // Upper bound on explored tie-break leaves.
  std::size_t leaf_budget = 4096;
};

struct CanonicalForm {
  std::string smiles;
  // Total order of atoms (0 = written first) behind `smiles`.
  std::vector<int> ranks;
};

// Iterative neighborhood refinement followed by branch-and-bound over the
// remaining ties; the lexicographically smallest SMILES wins.
CanonicalForm canonicalize(const MolGraph &g,
                           const CanonicalOptions &options = {});

std::string canonical_smiles(const MolGraph &g,
                             const CanonicalOptions &options = {});

// Canonical SMILES with atom maps and stereo stripped: the identity used to
// compare molecules produced along different paths.
std::string molecule_key(const MolGraph &g);

// Refined (possibly tied) atom classes; equal values mean the refinement
// could not tell the atoms apart.
std::vector<int> refined_classes(const MolGraph &g,
                                 const CanonicalOptions &options = {});

}  // namespace semiretro::chem

#endif  // SEMIRETRO_CHEM_CANONICAL_H_
