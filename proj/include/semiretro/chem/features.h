//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_CHEM_FEATURES_H_
#define SEMIRETRO_CHEM_FEATURES_H_

#include <vector>

#include "semiretro/chem/mol_graph.h"

namespace semiretro::chem {

// Atom vector layout (one-hot blocks, then flags):
//   element[21] | hydrogens 0..4 | heavy degree 0..6 | total valence 0..7 |
//   aromatic | ring | ring3 | ring4 | ring5 | ring6 | ring6+
// Out-of-range counts saturate into the last slot of their block.
inline constexpr int kAtomElementSlots = 21;
inline constexpr int kAtomHydrogenOffset = kAtomElementSlots;
inline constexpr int kAtomDegreeOffset = kAtomHydrogenOffset + 5;
inline constexpr int kAtomValenceOffset = kAtomDegreeOffset + 7;
inline constexpr int kAtomAromaticOffset = kAtomValenceOffset + 8;
inline constexpr int kAtomRingOffset = kAtomAromaticOffset + 1;
inline constexpr int kAtomFeatureWidth = kAtomRingOffset + 6;

// Bond vector layout:
//   type[single, double, triple, aromatic] | direction[none, up, down] |
//   stereo[none, cis, trans] | conjugated | length (always 0)
inline constexpr int kBondTypeOffset = 0;
inline constexpr int kBondDirOffset = 4;
inline constexpr int kBondStereoOffset = 7;
inline constexpr int kBondConjugatedOffset = 10;
inline constexpr int kBondLengthOffset = 11;
inline constexpr int kBondFeatureWidth = 12;

enum class BondStereo { kNone = 0, kCis = 1, kTrans = 2 };

// Slot of an element inside the element block.
int element_slot(int atomic_number);

std::vector<double> featurize_atom(const MolGraph &g, int atom);
std::vector<double> featurize_atom(const MolGraph &g, const RingInfo &rings,
                                   int atom);

std::vector<double> featurize_bond(const MolGraph &g, int bond);

bool bond_conjugated(const MolGraph &g, int bond);

// Double-bond configuration implied by directional single bonds.
BondStereo bond_stereo(const MolGraph &g, int bond);

}  // namespace semiretro::chem

#endif  // SEMIRETRO_CHEM_FEATURES_H_
