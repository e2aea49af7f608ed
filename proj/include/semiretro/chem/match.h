//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_CHEM_MATCH_H_
#define SEMIRETRO_CHEM_MATCH_H_

#include <cstddef>
#include <functional>
#include <vector>

#include "semiretro/chem/mol_graph.h"

namespace semiretro::chem {

struct MatchOptions {
  bool charge = true;
  bool aromatic = true;
  bool bond_order = true;
  bool hydrogens = false;
  bool isotope = false;
  bool atom_maps = false;
  bool synthon_flags = false;
  // Target may not hold bonds between matched atoms absent from the pattern.
  bool induced = false;
  // Stop after this many mappings; 0 means enumerate all.
  std::size_t max_matches = 0;
  // Extra per-pair constraint (pattern atom, target atom).
  std::function<bool(int, int)> atom_filter;
};

// Index maps pattern atom -> target atom. Pattern atoms with element 0 match
// any target atom regardless of charge or aromaticity. Results are produced in
// a deterministic depth-first order.
std::vector<std::vector<int>> subgraph_match(const MolGraph &pattern,
                                             const MolGraph &target,
                                             const MatchOptions &options = {});

// Full labeled isomorphism (hydrogens, charge, aromaticity, bond orders,
// isotope, synthon flags); atom maps optionally.
bool is_isomorphic(const MolGraph &a, const MolGraph &b,
                   bool compare_atom_maps = false);

}  // namespace semiretro::chem

#endif  // SEMIRETRO_CHEM_MATCH_H_
