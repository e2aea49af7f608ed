//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_MODEL_GRAPH_BATCH_H_
#define SEMIRETRO_MODEL_GRAPH_BATCH_H_

#include <span>
#include <utility>
#include <vector>

#include "semiretro/chem/mol_graph.h"
#include "semiretro/tensor/tensor.h"

namespace semiretro::model {

// Featurized molecule. Bond b contributes directed edges 2b (begin -> end)
// and 2b + 1 (end -> begin), both carrying the bond's feature row.
struct GraphFeatures {
  tensor::Matrix atoms;  // num_atoms x chem::kAtomFeatureWidth
  tensor::Matrix bonds;  // num_bonds x chem::kBondFeatureWidth
  std::vector<std::pair<int, int>> bond_ends;

  int num_atoms() const { return static_cast<int>(atoms.rows()); }
  int num_bonds() const { return static_cast<int>(bonds.rows()); }
};

GraphFeatures featurize(const chem::MolGraph &g);

// Disjoint union of several graphs with global atom and edge numbering.
struct GraphBatch {
  tensor::Matrix atoms;
  tensor::Matrix edges;  // one row per directed edge
  std::vector<int> src;
  std::vector<int> dst;
  std::vector<int> graph_of_atom;
  std::vector<int> atom_offset;  // size num_graphs + 1
  std::vector<int> bond_offset;  // size num_graphs + 1; undirected bonds
  int num_graphs = 0;

  int num_atoms() const { return static_cast<int>(atoms.rows()); }
  int num_edges() const { return static_cast<int>(src.size()); }
};

GraphBatch make_batch(std::span<const GraphFeatures *const> graphs);
GraphBatch make_batch(const GraphFeatures &g);

}  // namespace semiretro::model

#endif  // SEMIRETRO_MODEL_GRAPH_BATCH_H_
