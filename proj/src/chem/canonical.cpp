//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/chem/canonical.h"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "semiretro/chem/smiles.h"

namespace semiretro::chem {
namespace {

using Invariant = std::array<std::int64_t, 11>;

std::vector<int> ranks_from_keys(const std::vector<Invariant> &keys) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> ranks(n);
  for (int i = 0; i < n; ++i) {
    if (i > 0 && keys[order[i]] == keys[order[i - 1]])
      ranks[order[i]] = ranks[order[i - 1]];
    else
      ranks[order[i]] = i;
  }
  return ranks;
}

int count_classes(const std::vector<int> &ranks) {
  std::vector<int> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<int>(
      std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

class Canonicalizer {
public:
  Canonicalizer(const MolGraph &g, const CanonicalOptions &opt)
      : g_(g), opt_(opt) {
    write_opt_.atom_maps = opt.atom_maps;
    write_opt_.stereo = opt.stereo;
    write_opt_.open_valence_dummies = opt.synthon_flags;
  }

  std::vector<int> initial_ranks() const;
  void refine(std::vector<int> &ranks) const;
  void search(std::vector<int> ranks);

  CanonicalForm result() && {
    return { std::move(best_), std::move(best_ranks_) };
  }

private:
  const MolGraph &g_;
  const CanonicalOptions &opt_;
  SmilesWriteOptions write_opt_;
  std::size_t leaves_ = 0;
  std::string best_;
  std::vector<int> best_ranks_;
  bool have_best_ = false;
};

std::vector<int> Canonicalizer::initial_ranks() const {
  const int n = g_.num_atoms();
  const RingInfo rings = find_rings(g_);
  std::vector<Invariant> keys(n);
  for (int i = 0; i < n; ++i) {
    const Atom &a = g_.atom(i);
    keys[i] = {
      g_.degree(i),
      a.element,
      a.isotope,
      a.formal_charge,
      g_.hydrogen_count(i),
      a.aromatic ? 1 : 0,
      rings.atom_in_ring[i] ? 1 : 0,
      opt_.atom_maps ? a.atom_map : 0,
      opt_.synthon_flags ? a.open_valence : 0,
      opt_.synthon_flags && a.attachment ? 1 : 0,
      opt_.extra_labels.empty()
          ? 0
          : static_cast<std::int64_t>(opt_.extra_labels[i]),
    };
  }
  return ranks_from_keys(keys);
}

void Canonicalizer::refine(std::vector<int> &ranks) const {
  const int n = g_.num_atoms();
  int classes = count_classes(ranks);
  std::vector<std::pair<int, std::vector<int>>> keys(n);
  while (classes < n) {
    for (int i = 0; i < n; ++i) {
      std::vector<int> nb;
      nb.reserve(g_.degree(i));
      for (const Neighbor &x: g_.neighbors(i))
        nb.push_back(ranks[x.atom] * 8
                     + static_cast<int>(g_.bond(x.bond).order));
      std::sort(nb.begin(), nb.end());
      keys[i] = { ranks[i], std::move(nb) };
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return keys[a] < keys[b]; });
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) {
      if (i > 0 && keys[order[i]] == keys[order[i - 1]])
        next[order[i]] = next[order[i - 1]];
      else
        next[order[i]] = i;
    }
    const int next_classes = count_classes(next);
    ranks = std::move(next);
    if (next_classes == classes)
      break;
    classes = next_classes;
  }
}

void Canonicalizer::search(std::vector<int> ranks) {
  refine(ranks);
  if (have_best_ && leaves_ >= opt_.leaf_budget)
    return;

  const int n = g_.num_atoms();
  // First tied cell: smallest rank value shared by several atoms.
  std::vector<int> count(n, 0);
  for (int r: ranks)
    ++count[r];
  int cell = -1;
  for (int r = 0; r < n; ++r) {
    if (count[r] > 1) {
      cell = r;
      break;
    }
  }

  if (cell < 0) {
    ++leaves_;
    std::string s = write_smiles_ordered(g_, ranks, write_opt_);
    if (!have_best_ || s < best_) {
      best_ = std::move(s);
      best_ranks_ = ranks;
      have_best_ = true;
    }
    return;
  }

  for (int v = 0; v < n; ++v) {
    if (ranks[v] != cell)
      continue;
    std::vector<int> split = ranks;
    for (int u = 0; u < n; ++u) {
      if (u != v && ranks[u] == cell)
        split[u] = cell + 1;
    }
    search(std::move(split));
    if (leaves_ >= opt_.leaf_budget)
      return;
  }
}

}  // namespace

CanonicalForm canonicalize(const MolGraph &g, const CanonicalOptions &options) {
  if (g.empty())
    return {};
  Canonicalizer c(g, options);
  c.search(c.initial_ranks());
  return std::move(c).result();
}

std::string canonical_smiles(const MolGraph &g,
                             const CanonicalOptions &options) {
  return canonicalize(g, options).smiles;
}

std::string molecule_key(const MolGraph &g) {
  CanonicalOptions opt;
  opt.atom_maps = false;
  opt.stereo = false;
  return canonical_smiles(g, opt);
}

std::vector<int> refined_classes(const MolGraph &g,
                                 const CanonicalOptions &options) {
  if (g.empty())
    return {};
  Canonicalizer c(g, options);
  std::vector<int> ranks = c.initial_ranks();
  c.refine(ranks);
  return ranks;
}

}  // namespace semiretro::chem
