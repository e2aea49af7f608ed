//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/model/graph_batch.h"

#include "semiretro/chem/features.h"

namespace semiretro::model {

GraphFeatures featurize(const chem::MolGraph &g) {
  GraphFeatures f;
  const chem::RingInfo rings = chem::find_rings(g);
  f.atoms.resize(g.num_atoms(), chem::kAtomFeatureWidth);
  for (int i = 0; i < g.num_atoms(); ++i) {
    const auto v = chem::featurize_atom(g, rings, i);
    for (int k = 0; k < chem::kAtomFeatureWidth; ++k)
      f.atoms(i, k) = v[k];
  }
  f.bonds.resize(g.num_bonds(), chem::kBondFeatureWidth);
  for (int b = 0; b < g.num_bonds(); ++b) {
    const auto v = chem::featurize_bond(g, b);
    for (int k = 0; k < chem::kBondFeatureWidth; ++k)
      f.bonds(b, k) = v[k];
    f.bond_ends.emplace_back(g.bond(b).begin, g.bond(b).end);
  }
  return f;
}

GraphBatch make_batch(std::span<const GraphFeatures *const> graphs) {
  GraphBatch batch;
  batch.num_graphs = static_cast<int>(graphs.size());
  int atoms = 0, bonds = 0;
  batch.atom_offset.push_back(0);
  batch.bond_offset.push_back(0);
  for (const GraphFeatures *g: graphs) {
    atoms += g->num_atoms();
    bonds += g->num_bonds();
    batch.atom_offset.push_back(atoms);
    batch.bond_offset.push_back(bonds);
  }
  batch.atoms.resize(atoms, chem::kAtomFeatureWidth);
  batch.edges.resize(2 * bonds, chem::kBondFeatureWidth);
  batch.graph_of_atom.reserve(atoms);
  batch.src.reserve(2 * bonds);
  batch.dst.reserve(2 * bonds);
  for (int gi = 0; gi < batch.num_graphs; ++gi) {
    const GraphFeatures &g = *graphs[gi];
    const int a0 = batch.atom_offset[gi];
    const int b0 = batch.bond_offset[gi];
    if (g.num_atoms() > 0)
      batch.atoms.middleRows(a0, g.num_atoms()) = g.atoms;
    batch.graph_of_atom.insert(batch.graph_of_atom.end(), g.num_atoms(), gi);
    for (int b = 0; b < g.num_bonds(); ++b) {
      const auto [u, v] = g.bond_ends[b];
      batch.edges.row(2 * (b0 + b)) = g.bonds.row(b);
      batch.edges.row(2 * (b0 + b) + 1) = g.bonds.row(b);
      batch.src.push_back(a0 + u);
      batch.dst.push_back(a0 + v);
      batch.src.push_back(a0 + v);
      batch.dst.push_back(a0 + u);
    }
  }
  return batch;
}

GraphBatch make_batch(const GraphFeatures &g) {
  const GraphFeatures *one[] = { &g };
  return make_batch(one);
}

}  // namespace semiretro::model
