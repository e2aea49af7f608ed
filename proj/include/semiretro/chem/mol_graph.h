//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_CHEM_MOL_GRAPH_H_
#define SEMIRETRO_CHEM_MOL_GRAPH_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace semiretro::chem {

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

// Contribution of a bond to an atom's valence; aromatic bonds count as one,
// the extra pi electron is accounted per atom (see MolGraph::valence_units).
int bond_valence_units(BondOrder order);

// Directional single-bond marks ('/' and '\'), relative to begin -> end.
enum class BondDir : std::uint8_t {
  kNone = 0,
  kUp = 1,
  kDown = 2,
};

enum class Chirality : std::uint8_t {
  kNone = 0,
  kCounterClockwise = 1,  // @
  kClockwise = 2,         // @@
};

// Marker for the implicit hydrogen in Atom::chiral_order.
inline constexpr int kImplicitHydrogenNeighbor = -1;

struct Atom {
  int element = 6;
  int formal_charge = 0;
  // Set for bracket atoms and for atoms whose hydrogen count was frozen by a
  // graph edit; unset means "implicit by the valence model".
  std::optional<int> explicit_hs;
  bool aromatic = false;
  int atom_map = 0;
  int isotope = 0;

  Chirality chirality = Chirality::kNone;
  // Neighbor atom indices in the order the chirality is expressed against.
  std::vector<int> chiral_order;

  // Synthon bookkeeping: bond-valence units removed when the atom was cut out
  // of its parent, and whether it belongs to the reaction atom set.
  int open_valence = 0;
  bool attachment = false;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;
  BondDir dir = BondDir::kNone;

  int other(int atom) const { return atom == begin ? end : begin; }
};

struct Neighbor {
  int atom;
  int bond;
};

class GraphError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class MolGraph {
public:
  MolGraph() = default;

  int add_atom(Atom atom);
  // Throws GraphError on self-loops, duplicate bonds and bad indices.
  int add_bond(int begin, int end, BondOrder order,
               BondDir dir = BondDir::kNone);
  void remove_bond(int bond_index);
  void set_bond_order(int bond_index, BondOrder order);

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  bool empty() const { return atoms_.empty(); }

  const Atom &atom(int i) const { return atoms_[i]; }
  Atom &mutable_atom(int i) { return atoms_[i]; }
  const Bond &bond(int i) const { return bonds_[i]; }
  Bond &mutable_bond(int i) { return bonds_[i]; }
  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const Bond> bonds() const { return bonds_; }

  std::span<const Neighbor> neighbors(int atom) const { return adj_[atom]; }
  int degree(int atom) const { return static_cast<int>(adj_[atom].size()); }

  // Bond index or -1.
  int find_bond(int a, int b) const;

  // Sum of bond valence units plus one for atoms carrying aromatic bonds.
  int valence_units(int atom) const;
  int implicit_hydrogens(int atom) const;
  int hydrogen_count(int atom) const;
  // Bonds plus hydrogens, the quantity checked against the valence table.
  int total_valence(int atom) const;
  bool valence_ok(int atom) const;

  // Pins every atom's hydrogen count so later bond edits do not change it.
  void freeze_hydrogens();

  // Connected components as lists of atom indices, each sorted, ordered by
  // their smallest member.
  std::vector<std::vector<int>> components() const;

  // Induced subgraph over `atoms` (in the given order). Chiral neighbor lists
  // are remapped; references to dropped atoms are kept as -2 so that writers
  // can tell the chirality is no longer expressible.
  MolGraph subgraph(std::span<const int> atoms) const;

  // Appends `other` and returns the index offset of its first atom.
  int append(const MolGraph &other);

  // Copy with atom maps cleared.
  MolGraph without_atom_maps() const;

  // Atom index for a nonzero map number, or -1.
  int find_atom_map(int map) const;

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adj_;

  void rebuild_adjacency();
};

// Ring perception by smallest cycle through each ring bond.
struct RingInfo {
  std::vector<bool> bond_in_ring;
  std::vector<bool> atom_in_ring;
  // Sorted, deduplicated ring sizes per atom: the length of every smallest
  // cycle through some ring bond that passes the atom. Independent of atom
  // order, unlike `rings`.
  std::vector<std::vector<int>> atom_ring_sizes;
  std::vector<std::vector<int>> rings;  // atom lists

  bool atom_in_ring_of_size(int atom, int size) const;
};

RingInfo find_rings(const MolGraph &g);

}  // namespace semiretro::chem

#endif  // SEMIRETRO_CHEM_MOL_GRAPH_H_
