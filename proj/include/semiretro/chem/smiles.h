//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_CHEM_SMILES_H_
#define SEMIRETRO_CHEM_SMILES_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "semiretro/chem/mol_graph.h"

namespace semiretro::chem {

enum class SmilesErrorKind {
  kUnbalancedParenthesis,
  kUnmatchedRingClosure,
  kUnknownElement,
  kValenceViolation,
  kSyntax,
};

class SmilesError: public std::runtime_error {
public:
  SmilesError(SmilesErrorKind kind, std::size_t offset, const std::string &what);

  SmilesErrorKind kind() const { return kind_; }
  // Byte offset into the input where the problem was detected.
  std::size_t offset() const { return offset_; }

private:
  SmilesErrorKind kind_;
  std::size_t offset_;
};

struct SmilesParseOptions {
  // Single-neighbor `*` atoms become open valence on their neighbor, the
  // inverse of how write_smiles renders synthon attachment points.
  bool dummies_as_open_valence = false;
  bool check_valence = true;
};

MolGraph parse_smiles(std::string_view text,
                      const SmilesParseOptions &options = {});

struct SmilesWriteOptions {
  bool atom_maps = true;
  bool stereo = true;
  // Emit one `*` per unit of open valence.
  bool open_valence_dummies = true;
};

std::string write_smiles(const MolGraph &g,
                         const SmilesWriteOptions &options = {});

// Writes with a traversal driven by `priority` (lower first): components start
// at their lowest-priority atom and neighbors are visited in priority order.
std::string write_smiles_ordered(const MolGraph &g,
                                 std::span<const int> priority,
                                 const SmilesWriteOptions &options = {});

}  // namespace semiretro::chem

#endif  // SEMIRETRO_CHEM_SMILES_H_
