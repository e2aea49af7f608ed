//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "semiretro/chem/element.h"
#include "semiretro/chem/smiles.h"

namespace semiretro::chem {
namespace {

// Parity of the permutation taking `from` to `to` (same elements).
bool odd_permutation(std::vector<int> from, const std::vector<int> &to) {
  int swaps = 0;
  for (std::size_t i = 0; i < to.size(); ++i) {
    if (from[i] == to[i])
      continue;
    auto it = std::find(from.begin() + static_cast<long>(i) + 1, from.end(),
                        to[i]);
    std::iter_swap(from.begin() + static_cast<long>(i), it);
    ++swaps;
  }
  return swaps % 2 == 1;
}

BondDir flipped(BondDir dir) {
  switch (dir) {
  case BondDir::kUp:
    return BondDir::kDown;
  case BondDir::kDown:
    return BondDir::kUp;
  default:
    return BondDir::kNone;
  }
}

class SmilesWriter {
public:
  SmilesWriter(const MolGraph &g, std::span<const int> priority,
               const SmilesWriteOptions &options)
      : g_(g), priority_(priority), opt_(options) { }

  std::string write();

private:
  const MolGraph &g_;
  std::span<const int> priority_;
  const SmilesWriteOptions &opt_;

  std::vector<bool> visited_;
  std::vector<int> parent_;
  // Tree children in visiting order.
  std::vector<std::vector<int>> children_;
  // Ring-closure bonds incident to each atom, in discovery order.
  std::vector<std::vector<int>> ring_bonds_;
  std::vector<int> ring_opener_;  // per bond: atom written first, or -1
  std::vector<int> ring_digit_;   // per bond
  std::set<int> free_digits_;
  int next_digit_ = 1;
  std::string out_;

  std::vector<Neighbor> sorted_neighbors(int atom) const;
  void discover(int root);
  void emit(int atom, int from_bond);
  std::string bond_symbol(int bond, int from) const;
  std::string atom_token(int atom, const std::vector<int> &written_order) const;
  int take_digit();
};

std::vector<Neighbor> SmilesWriter::sorted_neighbors(int atom) const {
  std::vector<Neighbor> nbrs(g_.neighbors(atom).begin(),
                             g_.neighbors(atom).end());
  std::sort(nbrs.begin(), nbrs.end(), [&](const Neighbor &a, const Neighbor &b) {
    return priority_[a.atom] < priority_[b.atom];
  });
  return nbrs;
}

void SmilesWriter::discover(int root) {
  // Iterative DFS that mirrors the order emit() will use.
  struct Frame {
    int atom;
    std::vector<Neighbor> nbrs;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;
  visited_[root] = true;
  stack.push_back({ root, sorted_neighbors(root) });
  std::vector<bool> bond_seen(g_.num_bonds(), false);
  while (!stack.empty()) {
    Frame &f = stack.back();
    if (f.next == f.nbrs.size()) {
      stack.pop_back();
      continue;
    }
    const Neighbor n = f.nbrs[f.next++];
    if (bond_seen[n.bond])
      continue;
    bond_seen[n.bond] = true;
    if (!visited_[n.atom]) {
      visited_[n.atom] = true;
      parent_[n.atom] = f.atom;
      children_[f.atom].push_back(n.atom);
      const int child = n.atom;
      stack.push_back({ child, sorted_neighbors(child) });
    } else {
      // Back edge: n.atom is an ancestor written before f.atom.
      ring_opener_[n.bond] = n.atom;
      ring_bonds_[n.atom].push_back(n.bond);
      ring_bonds_[f.atom].push_back(n.bond);
    }
  }
}

int SmilesWriter::take_digit() {
  if (!free_digits_.empty()) {
    const int d = *free_digits_.begin();
    free_digits_.erase(free_digits_.begin());
    return d;
  }
  return next_digit_++;
}

std::string SmilesWriter::bond_symbol(int bond, int from) const {
  const Bond &b = g_.bond(bond);
  const bool both_aromatic = g_.atom(b.begin).aromatic
                             && g_.atom(b.end).aromatic;
  switch (b.order) {
  case BondOrder::kDouble:
    return "=";
  case BondOrder::kTriple:
    return "#";
  case BondOrder::kAromatic:
    return both_aromatic ? "" : ":";
  case BondOrder::kSingle:
    break;
  }
  if (opt_.stereo && b.dir != BondDir::kNone) {
    const BondDir dir = b.begin == from ? b.dir : flipped(b.dir);
    return dir == BondDir::kUp ? "/" : "\\";
  }
  return both_aromatic ? "-" : "";
}

std::string SmilesWriter::atom_token(
    int atom, const std::vector<int> &written_order) const {
  const Atom &a = g_.atom(atom);
  const int hs = g_.hydrogen_count(atom);

  Chirality chirality = Chirality::kNone;
  if (opt_.stereo && a.chirality != Chirality::kNone) {
    std::vector<int> stored = a.chiral_order;
    std::vector<int> now = written_order;
    std::vector<int> s_sorted = stored, n_sorted = now;
    std::sort(s_sorted.begin(), s_sorted.end());
    std::sort(n_sorted.begin(), n_sorted.end());
    if (s_sorted == n_sorted && stored.size() >= 3) {
      chirality = a.chirality;
      if (odd_permutation(stored, now)) {
        chirality = chirality == Chirality::kClockwise
                        ? Chirality::kCounterClockwise
                        : Chirality::kClockwise;
      }
    }
  }

  const bool show_map = opt_.atom_maps && a.atom_map > 0;
  bool bracket = a.formal_charge != 0 || a.isotope != 0 || show_map
                 || chirality != Chirality::kNone;
  if (a.element == kWildcard) {
    bracket = bracket || hs != 0;
  } else if (!is_organic_subset(a.element)
             || (a.aromatic && !can_be_aromatic(a.element))) {
    bracket = true;
  } else if (!bracket) {
    // Would a reader infer the same hydrogen count?
    auto vals = allowed_valences(a.element, 0);
    const int used = g_.valence_units(atom)
                     + (opt_.open_valence_dummies ? a.open_valence : 0);
    int implicit = 0;
    if (a.aromatic) {
      implicit = std::max(0, vals.front() - used);
    } else {
      for (int v: vals) {
        if (v >= used) {
          implicit = v - used;
          break;
        }
      }
    }
    bracket = implicit != hs;
  }

  std::string sym(element_symbol(a.element));
  if (a.aromatic && a.element != kWildcard)
    sym[0] = static_cast<char>(std::tolower(sym[0]));

  if (!bracket)
    return sym;

  std::string tok = "[";
  if (a.isotope)
    tok += std::to_string(a.isotope);
  tok += sym;
  if (chirality == Chirality::kCounterClockwise)
    tok += "@";
  else if (chirality == Chirality::kClockwise)
    tok += "@@";
  if (hs > 0) {
    tok += "H";
    if (hs > 1)
      tok += std::to_string(hs);
  }
  if (a.formal_charge != 0) {
    tok += a.formal_charge > 0 ? "+" : "-";
    const int mag = std::abs(a.formal_charge);
    if (mag > 1)
      tok += std::to_string(mag);
  }
  if (show_map)
    tok += ":" + std::to_string(a.atom_map);
  tok += "]";
  return tok;
}

void SmilesWriter::emit(int root, int root_bond) {
  struct Frame {
    int atom;
    int from_bond;
    std::size_t next_child;
    bool opened_branch;
  };
  // Recursive structure expressed with an explicit stack; branch parentheses
  // are emitted for every child but the last.
  std::vector<Frame> stack;
  auto write_atom = [&](int atom, int from_bond) {
    const Atom &a = g_.atom(atom);
    std::vector<int> written_order;
    if (parent_[atom] >= 0)
      written_order.push_back(parent_[atom]);
    if (g_.hydrogen_count(atom) > 0)
      written_order.push_back(kImplicitHydrogenNeighbor);

    std::string digits;
    std::vector<int> released;
    for (int rb: ring_bonds_[atom]) {
      const int partner = g_.bond(rb).other(atom);
      written_order.push_back(partner);
      int digit;
      std::string sym;
      if (ring_opener_[rb] == atom) {
        digit = take_digit();
        ring_digit_[rb] = digit;
        sym = bond_symbol(rb, atom);
      } else {
        digit = ring_digit_[rb];
        released.push_back(digit);
      }
      digits += sym;
      digits += digit < 10 ? std::to_string(digit)
                           : "%" + std::to_string(digit);
    }
    for (int d: released)
      free_digits_.insert(d);
    for (int c: children_[atom])
      written_order.push_back(c);
    const int dummies = opt_.open_valence_dummies ? a.open_valence : 0;

    if (from_bond >= 0)
      out_ += bond_symbol(from_bond, parent_[atom]);
    out_ += atom_token(atom, written_order);
    out_ += digits;
    for (int i = 0; i < dummies; ++i)
      out_ += "(*)";
  };

  write_atom(root, root_bond);
  stack.push_back({ root, root_bond, 0, false });
  while (!stack.empty()) {
    Frame &f = stack.back();
    const auto &kids = children_[f.atom];
    if (f.next_child == kids.size()) {
      const bool close = f.opened_branch;
      stack.pop_back();
      if (close)
        out_ += ")";
      continue;
    }
    const int child = kids[f.next_child++];
    const bool last = f.next_child == kids.size();
    if (!last)
      out_ += "(";
    const int bond = g_.find_bond(f.atom, child);
    write_atom(child, bond);
    stack.push_back({ child, bond, 0, !last });
  }
}

std::string SmilesWriter::write() {
  const int n = g_.num_atoms();
  visited_.assign(n, false);
  parent_.assign(n, -1);
  children_.assign(n, {});
  ring_bonds_.assign(n, {});
  ring_opener_.assign(g_.num_bonds(), -1);
  ring_digit_.assign(g_.num_bonds(), 0);

  std::vector<int> atoms(n);
  std::iota(atoms.begin(), atoms.end(), 0);
  std::sort(atoms.begin(), atoms.end(),
            [&](int a, int b) { return priority_[a] < priority_[b]; });

  bool first = true;
  for (int root: atoms) {
    if (visited_[root])
      continue;
    discover(root);
    // Ring bonds must be listed per atom in the order digits are written:
    // the discovery order above already follows the emit traversal.
    if (!first)
      out_ += ".";
    first = false;
    free_digits_.clear();
    next_digit_ = 1;
    emit(root, -1);
  }
  return out_;
}

}  // namespace

std::string write_smiles_ordered(const MolGraph &g,
                                 std::span<const int> priority,
                                 const SmilesWriteOptions &options) {
  SmilesWriter writer(g, priority, options);
  return writer.write();
}

std::string write_smiles(const MolGraph &g, const SmilesWriteOptions &options) {
  std::vector<int> priority(g.num_atoms());
  std::iota(priority.begin(), priority.end(), 0);
  return write_smiles_ordered(g, priority, options);
}

}  // namespace semiretro::chem
