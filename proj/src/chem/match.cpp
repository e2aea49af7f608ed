//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/chem/match.h"

#include <algorithm>
#include <vector>

#include "semiretro/chem/element.h"

namespace semiretro::chem {
namespace {

class Matcher {
public:
  Matcher(const MolGraph &p, const MolGraph &t, const MatchOptions &opt)
      : p_(p), t_(t), opt_(opt), map_(p.num_atoms(), -1),
        used_(t.num_atoms(), false) {
    plan();
  }

  std::vector<std::vector<int>> run() {
    if (p_.num_atoms() <= t_.num_atoms())
      extend(0);
    return std::move(out_);
  }

private:
  const MolGraph &p_;
  const MolGraph &t_;
  const MatchOptions &opt_;
  // Pattern atoms in matching order; anchor_[k] is an earlier-matched
  // neighbor of order_[k] (or -1 when it starts a new component).
  std::vector<int> order_;
  std::vector<int> anchor_;
  std::vector<int> map_;
  std::vector<bool> used_;
  std::vector<std::vector<int>> out_;

  void plan();
  bool atom_ok(int pa, int ta) const;
  bool bonds_ok(int pa, int ta) const;
  bool done() const {
    return opt_.max_matches > 0 && out_.size() >= opt_.max_matches;
  }
  void extend(std::size_t depth);
};

void Matcher::plan() {
  const int n = p_.num_atoms();
  std::vector<bool> placed(n, false);
  // Seed each component with its most constrained atom: concrete element,
  // then highest degree, then lowest index.
  auto better_seed = [&](int a, int b) {
    const bool wa = p_.atom(a).element == kWildcard;
    const bool wb = p_.atom(b).element == kWildcard;
    if (wa != wb)
      return !wa;
    if (p_.degree(a) != p_.degree(b))
      return p_.degree(a) > p_.degree(b);
    return a < b;
  };
  while (static_cast<int>(order_.size()) < n) {
    int seed = -1;
    for (int i = 0; i < n; ++i) {
      if (!placed[i] && (seed < 0 || better_seed(i, seed)))
        seed = i;
    }
    placed[seed] = true;
    order_.push_back(seed);
    anchor_.push_back(-1);
    for (std::size_t k = order_.size() - 1; k < order_.size(); ++k) {
      for (const Neighbor &nb: p_.neighbors(order_[k])) {
        if (placed[nb.atom])
          continue;
        placed[nb.atom] = true;
        order_.push_back(nb.atom);
        anchor_.push_back(order_[k]);
      }
    }
  }
}

bool Matcher::atom_ok(int pa, int ta) const {
  const Atom &a = p_.atom(pa);
  const Atom &b = t_.atom(ta);
  if (opt_.atom_filter && !opt_.atom_filter(pa, ta))
    return false;
  if (t_.degree(ta) < p_.degree(pa))
    return false;
  if (a.element != kWildcard) {
    if (a.element != b.element)
      return false;
    if (opt_.charge && a.formal_charge != b.formal_charge)
      return false;
    if (opt_.aromatic && a.aromatic != b.aromatic)
      return false;
    if (opt_.isotope && a.isotope != b.isotope)
      return false;
  }
  if (opt_.hydrogens && p_.hydrogen_count(pa) != t_.hydrogen_count(ta))
    return false;
  if (opt_.atom_maps && a.atom_map != b.atom_map)
    return false;
  if (opt_.synthon_flags
      && (a.open_valence != b.open_valence || a.attachment != b.attachment))
    return false;
  return true;
}

bool Matcher::bonds_ok(int pa, int ta) const {
  for (const Neighbor &nb: p_.neighbors(pa)) {
    const int tb_atom = map_[nb.atom];
    if (tb_atom < 0)
      continue;
    const int tb = t_.find_bond(ta, tb_atom);
    if (tb < 0)
      return false;
    if (opt_.bond_order && t_.bond(tb).order != p_.bond(nb.bond).order)
      return false;
  }
  if (opt_.induced) {
    for (const Neighbor &nb: t_.neighbors(ta)) {
      if (!used_[nb.atom])
        continue;
      // Find the pattern atom mapped onto nb.atom.
      const auto it = std::find(map_.begin(), map_.end(), nb.atom);
      const int pb = static_cast<int>(it - map_.begin());
      if (p_.find_bond(pa, pb) < 0)
        return false;
    }
  }
  return true;
}

void Matcher::extend(std::size_t depth) {
  if (done())
    return;
  if (depth == order_.size()) {
    out_.push_back(map_);
    return;
  }
  const int pa = order_[depth];
  auto try_target = [&](int ta) {
    if (used_[ta] || !atom_ok(pa, ta) || !bonds_ok(pa, ta))
      return;
    map_[pa] = ta;
    used_[ta] = true;
    extend(depth + 1);
    used_[ta] = false;
    map_[pa] = -1;
  };
  if (anchor_[depth] >= 0) {
    std::vector<int> cands;
    for (const Neighbor &nb: t_.neighbors(map_[anchor_[depth]]))
      cands.push_back(nb.atom);
    std::sort(cands.begin(), cands.end());
    for (int ta: cands) {
      try_target(ta);
      if (done())
        return;
    }
  } else {
    for (int ta = 0; ta < t_.num_atoms(); ++ta) {
      try_target(ta);
      if (done())
        return;
    }
  }
}

}  // namespace

std::vector<std::vector<int>> subgraph_match(const MolGraph &pattern,
                                             const MolGraph &target,
                                             const MatchOptions &options) {
  if (pattern.empty())
    return { {} };
  return Matcher(pattern, target, options).run();
}

bool is_isomorphic(const MolGraph &a, const MolGraph &b,
                   bool compare_atom_maps) {
  if (a.num_atoms() != b.num_atoms() || a.num_bonds() != b.num_bonds())
    return false;
  if (a.empty())
    return true;
  // Wildcards must only match wildcards here, so compare elements through
  // the filter as well.
  MatchOptions opt;
  opt.hydrogens = true;
  opt.isotope = true;
  opt.atom_maps = compare_atom_maps;
  opt.synthon_flags = true;
  opt.induced = true;
  opt.max_matches = 1;
  opt.atom_filter = [&](int pa, int ta) {
    return a.atom(pa).element == b.atom(ta).element
           && a.atom(pa).formal_charge == b.atom(ta).formal_charge
           && a.atom(pa).aromatic == b.atom(ta).aromatic
           && a.degree(pa) == b.degree(ta);
  };
  return !subgraph_match(a, b, opt).empty();
}

}  // namespace semiretro::chem
