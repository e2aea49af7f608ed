//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/reaction/synthon.h"

#include <algorithm>

#include "semiretro/chem/canonical.h"

namespace semiretro::reaction {

std::vector<int> Synthon::attachment_atoms() const {
  std::vector<int> out;
  for (int i = 0; i < graph.num_atoms(); ++i) {
    if (graph.atom(i).attachment)
      out.push_back(i);
  }
  return out;
}

std::vector<Synthon> break_into_synthons(const chem::MolGraph &product,
                                         const CenterLabel &label,
                                         std::string_view origin) {
  chem::MolGraph g = product;
  g.freeze_hydrogens();
  for (int a: label.atom_centers)
    g.mutable_atom(a).attachment = true;

  std::vector<std::pair<int, int>> cut;
  for (const auto &[a, b]: label.bond_centers) {
    const int bond = g.find_bond(a, b);
    if (bond < 0)
      throw ReactionError("bond center is not a product bond");
    const int units = chem::bond_valence_units(g.bond(bond).order);
    for (int x: { a, b }) {
      g.mutable_atom(x).open_valence += units;
      g.mutable_atom(x).attachment = true;
    }
    g.remove_bond(bond);
    cut.push_back({ a, b });
  }

  const auto parts = g.components();
  std::vector<int> part_of(g.num_atoms());
  for (int c = 0; c < static_cast<int>(parts.size()); ++c) {
    for (int a: parts[c])
      part_of[a] = c;
  }

  std::vector<Synthon> out(parts.size());
  for (int c = 0; c < static_cast<int>(parts.size()); ++c) {
    out[c].graph = g.subgraph(parts[c]);
    out[c].product_atoms = parts[c];
    out[c].origin = std::string(origin);
  }
  for (const auto &[a, b]: cut) {
    const int x = part_of[a], y = part_of[b];
    if (x == y)
      continue;
    out[x].linked.push_back(y);
    out[y].linked.push_back(x);
  }
  for (int c = 0; c < static_cast<int>(out.size()); ++c) {
    auto &l = out[c].linked;
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    out[c].dual = l.empty() ? c : l.front();
  }
  return out;
}

std::string synthon_set_key(const std::vector<Synthon> &synthons) {
  std::vector<std::string> parts;
  for (const Synthon &s: synthons) {
    chem::MolGraph g = s.graph;
    for (int i = 0; i < g.num_atoms(); ++i)
      g.mutable_atom(i).atom_map = s.product_atoms[i] + 1;
    chem::CanonicalOptions opts;
    opts.stereo = false;
    parts.push_back(chem::canonicalize(g, opts).smiles);
  }
  std::sort(parts.begin(), parts.end());
  std::string key;
  for (const auto &p: parts)
    key += (key.empty() ? "" : ".") + p;
  return key;
}

}  // namespace semiretro::reaction
