//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/chem/mol_graph.h"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <string>

#include "semiretro/chem/element.h"

namespace semiretro::chem {

int bond_valence_units(BondOrder order) {
  switch (order) {
  case BondOrder::kSingle:
  case BondOrder::kAromatic:
    return 1;
  case BondOrder::kDouble:
    return 2;
  case BondOrder::kTriple:
    return 3;
  }
  return 1;
}

int MolGraph::add_atom(Atom atom) {
  atoms_.push_back(std::move(atom));
  adj_.emplace_back();
  return num_atoms() - 1;
}

int MolGraph::add_bond(int begin, int end, BondOrder order, BondDir dir) {
  if (begin < 0 || end < 0 || begin >= num_atoms() || end >= num_atoms())
    throw GraphError("bond endpoint out of range");
  if (begin == end)
    throw GraphError("self-loop bond on atom " + std::to_string(begin));
  if (find_bond(begin, end) >= 0)
    throw GraphError("duplicate bond " + std::to_string(begin) + "-"
                     + std::to_string(end));
  bonds_.push_back({ begin, end, order, dir });
  const int idx = num_bonds() - 1;
  adj_[begin].push_back({ end, idx });
  adj_[end].push_back({ begin, idx });
  return idx;
}

void MolGraph::remove_bond(int bond_index) {
  bonds_.erase(bonds_.begin() + bond_index);
  rebuild_adjacency();
}

void MolGraph::set_bond_order(int bond_index, BondOrder order) {
  bonds_[bond_index].order = order;
}

void MolGraph::rebuild_adjacency() {
  adj_.assign(atoms_.size(), {});
  for (int b = 0; b < num_bonds(); ++b) {
    adj_[bonds_[b].begin].push_back({ bonds_[b].end, b });
    adj_[bonds_[b].end].push_back({ bonds_[b].begin, b });
  }
}

int MolGraph::find_bond(int a, int b) const {
  if (a < 0 || a >= num_atoms())
    return -1;
  for (const Neighbor &n: adj_[a]) {
    if (n.atom == b)
      return n.bond;
  }
  return -1;
}

namespace {

int plain_bond_units(const MolGraph &g, int atom) {
  int sum = 0;
  for (const Neighbor &n: g.neighbors(atom))
    sum += bond_valence_units(g.bond(n.bond).order);
  return sum;
}

bool has_aromatic_bond(const MolGraph &g, int atom) {
  return std::any_of(g.neighbors(atom).begin(), g.neighbors(atom).end(),
                     [&](const Neighbor &n) {
                       return g.bond(n.bond).order == BondOrder::kAromatic;
                     });
}

}  // namespace

int MolGraph::valence_units(int atom) const {
  int sum = plain_bond_units(*this, atom);
  if (atoms_[atom].aromatic && has_aromatic_bond(*this, atom))
    ++sum;
  return sum;
}

int MolGraph::implicit_hydrogens(int atom) const {
  const Atom &a = atoms_[atom];
  if (a.explicit_hs)
    return 0;
  if (!is_organic_subset(a.element))
    return 0;
  auto vals = allowed_valences(a.element, a.formal_charge);
  if (vals.empty())
    return 0;
  const int used = valence_units(atom) + a.open_valence;
  if (a.aromatic) {
    // Aromatic atoms only use the lowest valence state.
    return std::max(0, vals.front() - used);
  }
  for (int v: vals) {
    if (v >= used)
      return v - used;
  }
  return 0;
}

int MolGraph::hydrogen_count(int atom) const {
  const Atom &a = atoms_[atom];
  if (a.explicit_hs)
    return *a.explicit_hs;
  return implicit_hydrogens(atom);
}

int MolGraph::total_valence(int atom) const {
  return valence_units(atom) + hydrogen_count(atom);
}

bool MolGraph::valence_ok(int atom) const {
  const Atom &a = atoms_[atom];
  if (hydrogen_count(atom) < 0)
    return false;
  auto vals = allowed_valences(a.element, a.formal_charge);
  if (vals.empty())
    return true;
  const int used = plain_bond_units(*this, atom) + hydrogen_count(atom)
                   + a.open_valence;
  return used <= vals.back();
}

void MolGraph::freeze_hydrogens() {
  for (int i = 0; i < num_atoms(); ++i)
    atoms_[i].explicit_hs = hydrogen_count(i);
}

std::vector<std::vector<int>> MolGraph::components() const {
  std::vector<int> comp(num_atoms(), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < num_atoms(); ++s) {
    if (comp[s] >= 0)
      continue;
    std::vector<int> members;
    std::deque<int> queue { s };
    comp[s] = static_cast<int>(out.size());
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      members.push_back(u);
      for (const Neighbor &n: adj_[u]) {
        if (comp[n.atom] < 0) {
          comp[n.atom] = comp[s];
          queue.push_back(n.atom);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

MolGraph MolGraph::subgraph(std::span<const int> atoms) const {
  std::vector<int> remap(num_atoms(), -2);
  for (int i = 0; i < static_cast<int>(atoms.size()); ++i)
    remap[atoms[i]] = i;

  MolGraph out;
  for (int old: atoms) {
    Atom a = atoms_[old];
    for (int &nb: a.chiral_order) {
      if (nb >= 0)
        nb = remap[nb];
    }
    out.add_atom(std::move(a));
  }
  for (const Bond &b: bonds_) {
    if (remap[b.begin] >= 0 && remap[b.end] >= 0)
      out.add_bond(remap[b.begin], remap[b.end], b.order, b.dir);
  }
  return out;
}

int MolGraph::append(const MolGraph &other) {
  const int offset = num_atoms();
  for (const Atom &src: other.atoms_) {
    Atom a = src;
    for (int &nb: a.chiral_order) {
      if (nb >= 0)
        nb += offset;
    }
    add_atom(std::move(a));
  }
  for (const Bond &b: other.bonds_)
    add_bond(b.begin + offset, b.end + offset, b.order, b.dir);
  return offset;
}

MolGraph MolGraph::without_atom_maps() const {
  MolGraph out = *this;
  for (Atom &a: out.atoms_)
    a.atom_map = 0;
  return out;
}

int MolGraph::find_atom_map(int map) const {
  if (map == 0)
    return -1;
  for (int i = 0; i < num_atoms(); ++i) {
    if (atoms_[i].atom_map == map)
      return i;
  }
  return -1;
}

bool RingInfo::atom_in_ring_of_size(int atom, int size) const {
  const auto &sizes = atom_ring_sizes[atom];
  return std::binary_search(sizes.begin(), sizes.end(), size);
}

RingInfo find_rings(const MolGraph &g) {
  const int n = g.num_atoms();
  RingInfo info;
  info.bond_in_ring.assign(g.num_bonds(), false);
  info.atom_in_ring.assign(n, false);
  info.atom_ring_sizes.assign(n, {});

  // Bridges via DFS low-link; every non-bridge bond lies on a cycle.
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<bool> is_bridge(g.num_bonds(), false);
  int timer = 0;
  std::function<void(int, int)> dfs = [&](int u, int parent_bond) {
    disc[u] = low[u] = timer++;
    for (const Neighbor &nb: g.neighbors(u)) {
      if (nb.bond == parent_bond)
        continue;
      if (disc[nb.atom] < 0) {
        dfs(nb.atom, nb.bond);
        low[u] = std::min(low[u], low[nb.atom]);
        if (low[nb.atom] > disc[u])
          is_bridge[nb.bond] = true;
      } else {
        low[u] = std::min(low[u], disc[nb.atom]);
      }
    }
  };
  for (int s = 0; s < n; ++s) {
    if (disc[s] < 0)
      dfs(s, -1);
  }

  // Distances from `s` over ring bonds other than `skip`.
  auto bfs = [&](int s, int skip) {
    std::vector<int> dist(n, -1);
    std::deque<int> queue { s };
    dist[s] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (const Neighbor &nb: g.neighbors(u)) {
        if (nb.bond == skip || is_bridge[nb.bond] || dist[nb.atom] >= 0)
          continue;
        dist[nb.atom] = dist[u] + 1;
        queue.push_back(nb.atom);
      }
    }
    return dist;
  };

  std::set<std::vector<int>> seen;
  for (int b = 0; b < g.num_bonds(); ++b) {
    if (is_bridge[b])
      continue;
    info.bond_in_ring[b] = true;
    const int src = g.bond(b).begin, dst = g.bond(b).end;
    // Sizes go to every atom on any smallest cycle through b, so they do not
    // depend on which of several equally short paths the search finds.
    const std::vector<int> ds = bfs(src, b), dd = bfs(dst, b);
    if (dd[src] >= 0) {
      for (int a = 0; a < n; ++a) {
        if (ds[a] >= 0 && dd[a] >= 0 && ds[a] + dd[a] == dd[src])
          info.atom_ring_sizes[a].push_back(dd[src] + 1);
      }
    }
    // Shortest path src -> dst avoiding bond b closes the smallest ring.
    std::vector<int> prev(n, -2);
    std::deque<int> queue { src };
    prev[src] = -1;
    while (!queue.empty() && prev[dst] == -2) {
      int u = queue.front();
      queue.pop_front();
      for (const Neighbor &nb: g.neighbors(u)) {
        if (nb.bond == b || is_bridge[nb.bond] || prev[nb.atom] != -2)
          continue;
        prev[nb.atom] = u;
        queue.push_back(nb.atom);
      }
    }
    if (prev[dst] == -2)
      continue;
    std::vector<int> ring;
    for (int v = dst; v != -1; v = prev[v])
      ring.push_back(v);
    std::vector<int> key = ring;
    std::sort(key.begin(), key.end());
    if (seen.insert(key).second)
      info.rings.push_back(std::move(ring));
  }

  for (const auto &ring: info.rings) {
    for (int a: ring)
      info.atom_in_ring[a] = true;
  }
  for (auto &sizes: info.atom_ring_sizes) {
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  }
  return info;
}

}  // namespace semiretro::chem
