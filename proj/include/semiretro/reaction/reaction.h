//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_REACTION_REACTION_H_
#define SEMIRETRO_REACTION_REACTION_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semiretro/chem/mol_graph.h"

namespace semiretro::reaction {

class ReactionError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// One line of a dataset file, kept verbatim for re-serialization.
struct ReactionRecord {
  std::string id;
  int reaction_class = 0;  // 0 = unknown
  std::string smiles;      // "reactants>>product" or "reactants>agents>product"
};

struct Reaction {
  std::string id;
  int reaction_class = 0;
  chem::MolGraph product;
  // Connected reactant molecules that contribute at least one product atom.
  std::vector<chem::MolGraph> reactants;
};

// Accepts "id,class,rxn" or tab-separated fields. Throws ReactionError.
ReactionRecord parse_record(std::string_view line);

// True for a header line such as "id,class,reactants>reagents>production".
bool is_header_line(std::string_view line);

Reaction parse_reaction_smiles(std::string_view rxn, std::string id = {},
                               int reaction_class = 0);

Reaction parse_reaction(const ReactionRecord &record);
Reaction parse_reaction(std::string_view line);

std::string format_record(const ReactionRecord &record);

struct LoadIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

// Records of a CSV/TSV file, skipping blank and header lines. Unparsable
// lines are reported through `issues` when given, otherwise rethrown.
std::vector<ReactionRecord> read_records(const std::string &path,
                                         std::vector<LoadIssue> *issues = nullptr);

// Parses every record, collecting failures in `issues`.
std::vector<Reaction> load_reactions(const std::vector<ReactionRecord> &records,
                                     std::vector<LoadIssue> *issues = nullptr);

// A single reaction center: an atom (b < 0) or a bond between atoms a < b.
struct Center {
  int a = -1;
  int b = -1;

  bool is_bond() const { return b >= 0; }
  auto operator<=>(const Center &) const = default;
};

struct CenterLabel {
  std::vector<int> atom_centers;                  // sorted product indices
  std::vector<std::pair<int, int>> bond_centers;  // sorted, first < second

  bool empty() const { return atom_centers.empty() && bond_centers.empty(); }
  std::size_t size() const { return atom_centers.size() + bond_centers.size(); }
  std::vector<Center> centers() const;
  static CenterLabel from_center(const Center &c);

  bool operator==(const CenterLabel &) const = default;
};

// Ground-truth centers from the atom mapping. Bond centers take precedence;
// atom centers are reported only when no product bond changed.
CenterLabel label_centers(const Reaction &rxn);

}  // namespace semiretro::reaction

#endif  // SEMIRETRO_REACTION_REACTION_H_
