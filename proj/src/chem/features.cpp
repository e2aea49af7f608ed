//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/chem/features.h"

#include <algorithm>
#include <array>

#include "semiretro/chem/element.h"

namespace semiretro::chem {
namespace {

constexpr std::array<int, kAtomElementSlots - 2> kElementSlots = {
  6, 7, 8, 9, 15, 16, 17, 35, 53, 5, 14, 34, 50, 12, 3, 30, 29, 11, 19,
};

void one_hot(std::vector<double> &v, int offset, int width, int value) {
  v[offset + std::clamp(value, 0, width - 1)] = 1.0;
}

bool has_multiple_bond(const MolGraph &g, int atom, int except_bond) {
  for (const Neighbor &nb: g.neighbors(atom)) {
    if (nb.bond != except_bond && g.bond(nb.bond).order != BondOrder::kSingle)
      return true;
  }
  return false;
}

// Saturated N/O/S that can donate a lone pair into an adjacent pi system.
bool lone_pair_donor(const MolGraph &g, int atom) {
  const Atom &a = g.atom(atom);
  if (a.aromatic || a.formal_charge > 0)
    return false;
  if (a.element != 7 && a.element != 8 && a.element != 16)
    return false;
  return !has_multiple_bond(g, atom, -1);
}

// Direction of a single bond read from `from` outward.
BondDir outward_dir(const MolGraph &g, int bond, int from) {
  const Bond &b = g.bond(bond);
  if (b.dir == BondDir::kNone || b.begin == from)
    return b.dir;
  return b.dir == BondDir::kUp ? BondDir::kDown : BondDir::kUp;
}

BondDir substituent_dir(const MolGraph &g, int atom, int except_bond) {
  for (const Neighbor &nb: g.neighbors(atom)) {
    if (nb.bond == except_bond)
      continue;
    const BondDir d = outward_dir(g, nb.bond, atom);
    if (d != BondDir::kNone)
      return d;
  }
  return BondDir::kNone;
}

}  // namespace

int element_slot(int atomic_number) {
  if (atomic_number == kWildcard)
    return kAtomElementSlots - 2;
  for (std::size_t i = 0; i < kElementSlots.size(); ++i) {
    if (kElementSlots[i] == atomic_number)
      return static_cast<int>(i);
  }
  return kAtomElementSlots - 1;
}

std::vector<double> featurize_atom(const MolGraph &g, int atom) {
  return featurize_atom(g, find_rings(g), atom);
}

std::vector<double> featurize_atom(const MolGraph &g, const RingInfo &rings,
                                   int atom) {
  std::vector<double> v(kAtomFeatureWidth, 0.0);
  v[element_slot(g.atom(atom).element)] = 1.0;
  one_hot(v, kAtomHydrogenOffset, 5, g.hydrogen_count(atom));
  one_hot(v, kAtomDegreeOffset, 7, g.degree(atom));
  one_hot(v, kAtomValenceOffset, 8, g.total_valence(atom));
  v[kAtomAromaticOffset] = g.atom(atom).aromatic ? 1.0 : 0.0;

  const auto &sizes = rings.atom_ring_sizes[atom];
  v[kAtomRingOffset] = rings.atom_in_ring[atom] ? 1.0 : 0.0;
  for (int s: sizes) {
    if (s >= 3 && s <= 6)
      v[kAtomRingOffset + s - 2] = 1.0;
    else if (s > 6)
      v[kAtomRingOffset + 5] = 1.0;
  }
  return v;
}

bool bond_conjugated(const MolGraph &g, int bond) {
  const Bond &b = g.bond(bond);
  if (b.order == BondOrder::kAromatic)
    return true;
  const bool u_pi = has_multiple_bond(g, b.begin, bond);
  const bool v_pi = has_multiple_bond(g, b.end, bond);
  if (b.order == BondOrder::kSingle) {
    return (u_pi && v_pi) || (u_pi && lone_pair_donor(g, b.end))
           || (v_pi && lone_pair_donor(g, b.begin));
  }
  // A multiple bond is conjugated when a neighbor across a single bond
  // carries another pi bond or a lone pair.
  for (int end: { b.begin, b.end }) {
    for (const Neighbor &nb: g.neighbors(end)) {
      if (nb.bond == bond || g.bond(nb.bond).order != BondOrder::kSingle)
        continue;
      if (has_multiple_bond(g, nb.atom, nb.bond) || lone_pair_donor(g, nb.atom))
        return true;
    }
  }
  return false;
}

BondStereo bond_stereo(const MolGraph &g, int bond) {
  const Bond &b = g.bond(bond);
  if (b.order != BondOrder::kDouble)
    return BondStereo::kNone;
  const BondDir u = substituent_dir(g, b.begin, bond);
  const BondDir v = substituent_dir(g, b.end, bond);
  if (u == BondDir::kNone || v == BondDir::kNone)
    return BondStereo::kNone;
  return u == v ? BondStereo::kCis : BondStereo::kTrans;
}

std::vector<double> featurize_bond(const MolGraph &g, int bond) {
  std::vector<double> v(kBondFeatureWidth, 0.0);
  const Bond &b = g.bond(bond);
  v[kBondTypeOffset + static_cast<int>(b.order) - 1] = 1.0;
  v[kBondDirOffset + static_cast<int>(b.dir)] = 1.0;
  v[kBondStereoOffset + static_cast<int>(bond_stereo(g, bond))] = 1.0;
  v[kBondConjugatedOffset] = bond_conjugated(g, bond) ? 1.0 : 0.0;
  v[kBondLengthOffset] = 0.0;
  return v;
}

}  // namespace semiretro::chem
