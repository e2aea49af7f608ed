//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_CHEM_ELEMENT_H_
#define SEMIRETRO_CHEM_ELEMENT_H_

#include <span>
#include <string_view>

namespace semiretro::chem {

// Atomic number 0 is the SMILES wildcard `*`.
inline constexpr int kWildcard = 0;
inline constexpr int kMaxAtomicNumber = 118;

// Returns -1 for unknown symbols. Symbols are case-sensitive ("Cl", not "CL").
int element_from_symbol(std::string_view symbol);

std::string_view element_symbol(int atomic_number);

// Neutral-atom valence states used by the implicit-hydrogen model. Empty for
// elements whose valence is not checked (metals, noble gases, wildcard).
std::span<const int> default_valences(int atomic_number);

// Valence states for a charged atom, using the isoelectronic shift
// (N+ behaves like C, O- like F, ...). Empty when unchecked.
std::span<const int> allowed_valences(int atomic_number, int formal_charge);

// Members of the SMILES organic subset that may be written without brackets.
bool is_organic_subset(int atomic_number);

// Elements that may be written as lowercase aromatic symbols.
bool can_be_aromatic(int atomic_number);

}  // namespace semiretro::chem

#endif  // SEMIRETRO_CHEM_ELEMENT_H_
