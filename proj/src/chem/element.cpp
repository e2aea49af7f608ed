//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/chem/element.h"

#include <array>
#include <string_view>

namespace semiretro::chem {
namespace {

constexpr std::array<std::string_view, kMaxAtomicNumber + 1> kSymbols = {
    "*",  "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
    "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
    "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
    "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
    "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
    "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
    "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am",
    "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh",
    "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
};

constexpr std::array kValH = {1};
constexpr std::array kValB = {3};
constexpr std::array kValC = {4};
constexpr std::array kValN = {3, 5};
constexpr std::array kValO = {2};
constexpr std::array kValF = {1};
constexpr std::array kValSi = {4};
constexpr std::array kValP = {3, 5};
constexpr std::array kValS = {2, 4, 6};
constexpr std::array kValHalogen = {1, 3, 5, 7};
constexpr std::array kValSe = {2, 4, 6};
constexpr std::array kValAs = {3, 5};
constexpr std::array kValTe = {2, 4, 6};

std::span<const int> valences_by_z(int z) {
  switch (z) {
  case 1:
    return kValH;
  case 5:
    return kValB;
  case 6:
    return kValC;
  case 7:
    return kValN;
  case 8:
    return kValO;
  case 9:
    return kValF;
  case 14:
    return kValSi;
  case 15:
    return kValP;
  case 16:
    return kValS;
  case 17:
  case 35:
  case 53:
    return kValHalogen;
  case 33:
    return kValAs;
  case 34:
    return kValSe;
  case 52:
    return kValTe;
  default:
    return {};
  }
}

}  // namespace

int element_from_symbol(std::string_view symbol) {
  for (int z = 0; z <= kMaxAtomicNumber; ++z) {
    if (kSymbols[z] == symbol)
      return z;
  }
  return -1;
}

std::string_view element_symbol(int atomic_number) {
  if (atomic_number < 0 || atomic_number > kMaxAtomicNumber)
    return "?";
  return kSymbols[atomic_number];
}

std::span<const int> default_valences(int atomic_number) {
  return valences_by_z(atomic_number);
}

std::span<const int> allowed_valences(int atomic_number, int formal_charge) {
  if (formal_charge == 0)
    return valences_by_z(atomic_number);
  // Only shift within the main-group p-block where the rule holds.
  const int shifted = atomic_number - formal_charge;
  const bool p_block = (atomic_number >= 5 && atomic_number <= 9)
                       || (atomic_number >= 13 && atomic_number <= 17)
                       || (atomic_number >= 31 && atomic_number <= 35)
                       || (atomic_number >= 49 && atomic_number <= 53);
  if (!p_block || shifted <= 1)
    return {};
  auto shifted_vals = valences_by_z(shifted);
  if (!shifted_vals.empty())
    return shifted_vals;
  return {};
}

bool is_organic_subset(int atomic_number) {
  switch (atomic_number) {
  case 5:
  case 6:
  case 7:
  case 8:
  case 9:
  case 15:
  case 16:
  case 17:
  case 35:
  case 53:
    return true;
  default:
    return false;
  }
}

bool can_be_aromatic(int atomic_number) {
  switch (atomic_number) {
  case 5:
  case 6:
  case 7:
  case 8:
  case 15:
  case 16:
  case 33:
  case 34:
  case 52:
    return true;
  default:
    return false;
  }
}

}  // namespace semiretro::chem
