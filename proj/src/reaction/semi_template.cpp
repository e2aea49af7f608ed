//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/reaction/semi_template.h"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <deque>
#include <numeric>

#include "semiretro/chem/canonical.h"
#include "semiretro/chem/match.h"
#include "semiretro/chem/smiles.h"

namespace semiretro::reaction {
namespace {

using chem::Atom;
using chem::BondOrder;
using chem::MolGraph;

std::uint64_t mix(std::uint64_t h, std::int64_t v) {
  h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::string signed_number(int v) {
  return (v >= 0 ? "+" : "") + std::to_string(v);
}

[[noreturn]] void malformed(std::string_view key, const std::string &why) {
  throw TemplateError(TemplateFailure::kMalformedTemplate,
                      "malformed template '" + std::string(key) + "': " + why);
}

int parse_int(std::string_view key, std::string_view text) {
  if (!text.empty() && text.front() == '+')
    text.remove_prefix(1);
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    malformed(key, "bad number '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (s.empty())
    return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string atom_edit_fields(const PatternAtom &p) {
  std::vector<std::string> f;
  if (p.attachment)
    f.push_back("a");
  if (p.open_valence != 0)
    f.push_back("o" + std::to_string(p.open_valence));
  if (p.charge_delta != 0)
    f.push_back("c" + signed_number(p.charge_delta));
  if (p.h_delta != 0)
    f.push_back("h" + signed_number(p.h_delta));
  if (p.aromatic_after >= 0)
    f.push_back("r" + std::to_string(p.aromatic_after));
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i)
    out += (i ? "," : "") + f[i];
  return out;
}

}  // namespace

std::string_view failure_name(TemplateFailure failure) {
  switch (failure) {
  case TemplateFailure::kNone:
    return "none";
  case TemplateFailure::kLabelError:
    return "label_error";
  case TemplateFailure::kUnmappedSynthonAtom:
    return "unmapped_synthon_atom";
  case TemplateFailure::kMissingInReactant:
    return "missing_in_reactant";
  case TemplateFailure::kSpansReactants:
    return "spans_reactants";
  case TemplateFailure::kSharedReactant:
    return "shared_reactant";
  case TemplateFailure::kInconsistentReactant:
    return "inconsistent_reactant";
  case TemplateFailure::kPatternMismatch:
    return "pattern_mismatch";
  case TemplateFailure::kInfeasible:
    return "infeasible";
  case TemplateFailure::kRoundTripMismatch:
    return "round_trip_mismatch";
  case TemplateFailure::kMalformedTemplate:
    return "malformed_template";
  }
  return "unknown";
}

SemiTemplate SemiTemplate::from_key(std::string_view key) {
  const auto parts = [&] {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (int i = 0; i < 2; ++i) {
      const std::size_t pos = key.find('|', start);
      if (pos == std::string_view::npos)
        malformed(key, "expected three '|'-separated fields");
      out.push_back(key.substr(start, pos - start));
      start = pos + 1;
    }
    out.push_back(key.substr(start));
    return out;
  }();

  SemiTemplate t;
  t.key_ = std::string(key);
  chem::SmilesParseOptions opt;
  opt.check_valence = false;
  try {
    t.graph_ = chem::parse_smiles(parts[0], opt);
  } catch (const chem::SmilesError &e) {
    malformed(key, e.what());
  }

  int count = 0;
  for (const Atom &a: t.graph_.atoms())
    count += a.atom_map > 0;
  t.pattern_.resize(count);
  t.pattern_index_.assign(count, -1);
  for (int i = 0; i < t.graph_.num_atoms(); ++i) {
    Atom &a = t.graph_.mutable_atom(i);
    if (a.atom_map == 0) {
      a.explicit_hs = t.graph_.hydrogen_count(i);
      continue;
    }
    const int k = a.atom_map - 1;
    if (k >= count || t.pattern_index_[k] >= 0)
      malformed(key, "pattern ordinals must be 1..n");
    t.pattern_index_[k] = i;
    t.pattern_[k].element = a.element;
    t.pattern_[k].aromatic = a.aromatic;
  }

  const auto atom_edits = split(parts[1], ';');
  if (static_cast<int>(atom_edits.size()) != count)
    malformed(key, "one edit entry per pattern atom expected");
  for (int k = 0; k < count; ++k) {
    const std::string_view entry = atom_edits[k];
    const std::size_t colon = entry.find(':');
    if (colon == std::string_view::npos
        || parse_int(key, entry.substr(0, colon)) != k + 1)
      malformed(key, "edit entries must be numbered in order");
    PatternAtom &p = t.pattern_[k];
    for (std::string_view f: split(entry.substr(colon + 1), ',')) {
      if (f.empty())
        malformed(key, "empty edit field");
      const std::string_view v = f.substr(1);
      switch (f.front()) {
      case 'a':
        p.attachment = true;
        break;
      case 'o':
        p.open_valence = parse_int(key, v);
        break;
      case 'c':
        p.charge_delta = parse_int(key, v);
        break;
      case 'h':
        p.h_delta = parse_int(key, v);
        break;
      case 'r':
        p.aromatic_after = parse_int(key, v);
        break;
      default:
        malformed(key, "unknown edit field '" + std::string(f) + "'");
      }
    }
  }

  for (std::string_view e: split(parts[2], ';')) {
    const std::size_t dash = e.find('-');
    const std::size_t colon = e.find(':');
    if (dash == std::string_view::npos || colon == std::string_view::npos
        || colon < dash)
      malformed(key, "bad bond edit");
    BondEdit be;
    be.a = parse_int(key, e.substr(0, dash)) - 1;
    be.b = parse_int(key, e.substr(dash + 1, colon - dash - 1)) - 1;
    const int order = parse_int(key, e.substr(colon + 1));
    if (be.a < 0 || be.b < 0 || be.a >= count || be.b >= count || be.a == be.b
        || order < 1 || order > 4)
      malformed(key, "bond edit out of range");
    be.order = static_cast<BondOrder>(order);
    t.bond_edits_.push_back(be);
  }
  return t;
}

std::string SemiTemplate::residual_smiles() const {
  // Attachment bonds to the pattern show up as open valence.
  MolGraph g = graph_;
  std::vector<int> keep;
  for (int i = 0; i < g.num_atoms(); ++i) {
    if (g.atom(i).atom_map != 0)
      continue;
    keep.push_back(i);
    for (const chem::Neighbor &nb: g.neighbors(i)) {
      if (g.atom(nb.atom).atom_map != 0)
        g.mutable_atom(i).open_valence +=
            chem::bond_valence_units(g.bond(nb.bond).order);
    }
  }
  return chem::canonical_smiles(g.subgraph(keep));
}

std::string SemiTemplate::pattern_smiles() const {
  return chem::write_smiles(graph_.subgraph(pattern_index_));
}

std::string SemiTemplate::edits_string() const {
  const std::size_t first = key_.find('|');
  return first == std::string::npos ? std::string() : key_.substr(first + 1);
}

bool SemiTemplate::is_identity() const {
  if (residual_atom_count() != 0 || !bond_edits_.empty())
    return false;
  return std::all_of(pattern_.begin(), pattern_.end(), [](const PatternAtom &p) {
    return p.charge_delta == 0 && p.h_delta == 0 && p.aromatic_after < 0;
  });
}

SemiTemplate extract_semi_template(const Synthon &synthon,
                                   const MolGraph &reactant) {
  const MolGraph &s = synthon.graph;
  const MolGraph &r = reactant;
  const int n = s.num_atoms();

  std::vector<int> image(n);
  std::vector<int> owner(r.num_atoms(), -1);
  for (int i = 0; i < n; ++i) {
    const int m = s.atom(i).atom_map;
    if (m == 0)
      throw TemplateError(TemplateFailure::kUnmappedSynthonAtom,
                          "synthon atom " + std::to_string(i) + " is unmapped");
    const int ri = r.find_atom_map(m);
    if (ri < 0)
      throw TemplateError(TemplateFailure::kMissingInReactant,
                          "map " + std::to_string(m) + " missing in reactant");
    if (r.atom(ri).element != s.atom(i).element)
      throw TemplateError(TemplateFailure::kInconsistentReactant,
                          "element differs at map " + std::to_string(m));
    image[i] = ri;
    owner[ri] = i;
  }
  for (const chem::Bond &b: s.bonds()) {
    const int rb = r.find_bond(image[b.begin], image[b.end]);
    if (rb < 0 || r.bond(rb).order != b.order)
      throw TemplateError(TemplateFailure::kInconsistentReactant,
                          "synthon bond absent or different in reactant");
  }

  std::vector<int> residual_units(n, 0), edit_units(n, 0);
  std::vector<std::vector<int>> edit_orders(n);
  struct RawEdit {
    int a, b;
    BondOrder order;
  };
  std::vector<RawEdit> raw_edits;
  for (const chem::Bond &b: r.bonds()) {
    const int u = owner[b.begin], v = owner[b.end];
    const int units = chem::bond_valence_units(b.order);
    if (u >= 0 && v >= 0) {
      if (s.find_bond(u, v) >= 0)
        continue;
      raw_edits.push_back({ u, v, b.order });
      edit_units[u] += units;
      edit_units[v] += units;
      edit_orders[u].push_back(static_cast<int>(b.order));
      edit_orders[v].push_back(static_cast<int>(b.order));
    } else if (u >= 0) {
      residual_units[u] += units;
    } else if (v >= 0) {
      residual_units[v] += units;
    }
  }

  std::vector<PatternAtom> props(n);
  std::vector<bool> in_pattern(n, false);
  for (int i = 0; i < n; ++i) {
    const Atom &sa = s.atom(i);
    const Atom &ra = r.atom(image[i]);
    PatternAtom &p = props[i];
    p.open_valence = sa.open_valence;
    p.attachment = sa.attachment;
    p.charge_delta = ra.formal_charge - sa.formal_charge;
    p.h_delta = r.hydrogen_count(image[i])
                - (s.hydrogen_count(i) + sa.open_valence - residual_units[i]
                   - edit_units[i]);
    if (ra.aromatic != sa.aromatic)
      p.aromatic_after = ra.aromatic ? 1 : 0;
    in_pattern[i] = sa.attachment || p.charge_delta != 0 || p.h_delta != 0
                    || p.aromatic_after >= 0 || residual_units[i] > 0
                    || edit_units[i] > 0;
  }

  // Tie edited interior atoms to the reaction atom set along BFS paths.
  std::vector<int> parent(n, -1);
  std::vector<bool> seen(n, false);
  std::deque<int> queue;
  for (int i = 0; i < n; ++i) {
    if (s.atom(i).attachment) {
      seen[i] = true;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    std::vector<int> nbrs;
    for (const chem::Neighbor &nb: s.neighbors(x))
      nbrs.push_back(nb.atom);
    std::sort(nbrs.begin(), nbrs.end());
    for (int y: nbrs) {
      if (!seen[y]) {
        seen[y] = true;
        parent[y] = x;
        queue.push_back(y);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!in_pattern[i] || s.atom(i).attachment)
      continue;
    for (int x = parent[i]; x >= 0 && !in_pattern[x]; x = parent[x])
      in_pattern[x] = true;
  }

  // Template graph: pattern atoms, then residual atoms.
  MolGraph t;
  std::vector<int> t_of_s(n, -1), t_of_r(r.num_atoms(), -1);
  std::vector<std::uint64_t> labels;
  std::vector<int> pattern_s;
  for (int i = 0; i < n; ++i) {
    if (!in_pattern[i])
      continue;
    const PatternAtom &p = props[i];
    const bool record = !s.atom(i).attachment || edit_units[i] > 0
                        || (residual_units[i] > 0
                            && residual_units[i] != s.atom(i).open_valence);
    Atom a;
    a.element = record ? s.atom(i).element : 0;
    a.aromatic = record && s.atom(i).aromatic;
    a.explicit_hs = 0;
    t_of_s[i] = t.add_atom(a);
    pattern_s.push_back(i);
    std::uint64_t h = mix(1, a.element);
    for (std::int64_t v: { std::int64_t(a.aromatic), std::int64_t(p.open_valence),
                           std::int64_t(p.attachment), std::int64_t(p.charge_delta),
                           std::int64_t(p.h_delta), std::int64_t(p.aromatic_after) })
      h = mix(h, v);
    std::vector<int> orders = edit_orders[i];
    std::sort(orders.begin(), orders.end());
    for (int o: orders)
      h = mix(h, o);
    labels.push_back(h);
  }
  for (int j = 0; j < r.num_atoms(); ++j) {
    if (owner[j] >= 0)
      continue;
    Atom a = r.atom(j);
    a.atom_map = 0;
    a.explicit_hs = r.hydrogen_count(j);
    a.chirality = chem::Chirality::kNone;
    a.chiral_order.clear();
    a.open_valence = 0;
    a.attachment = false;
    t_of_r[j] = t.add_atom(a);
    labels.push_back(0);
  }
  for (const chem::Bond &b: s.bonds()) {
    if (t_of_s[b.begin] >= 0 && t_of_s[b.end] >= 0)
      t.add_bond(t_of_s[b.begin], t_of_s[b.end], b.order);
  }
  for (const chem::Bond &b: r.bonds()) {
    if (owner[b.begin] >= 0 && owner[b.end] >= 0)
      continue;
    const int u = owner[b.begin] >= 0 ? t_of_s[owner[b.begin]] : t_of_r[b.begin];
    const int v = owner[b.end] >= 0 ? t_of_s[owner[b.end]] : t_of_r[b.end];
    t.add_bond(u, v, b.order);
  }

  chem::CanonicalOptions copt;
  copt.atom_maps = false;
  copt.stereo = false;
  copt.synthon_flags = false;
  copt.extra_labels = labels;
  const std::vector<int> ranks = chem::canonicalize(t, copt).ranks;

  std::vector<int> by_rank(pattern_s.size());
  std::iota(by_rank.begin(), by_rank.end(), 0);
  std::sort(by_rank.begin(), by_rank.end(),
            [&](int x, int y) { return ranks[x] < ranks[y]; });
  std::vector<int> ordinal_of_s(n, -1);
  for (int k = 0; k < static_cast<int>(by_rank.size()); ++k) {
    ordinal_of_s[pattern_s[by_rank[k]]] = k;
    t.mutable_atom(by_rank[k]).atom_map = k + 1;
  }

  chem::CanonicalOptions wopt;
  wopt.atom_maps = true;
  wopt.stereo = false;
  wopt.synthon_flags = false;
  std::string key = chem::canonical_smiles(t, wopt) + "|";
  for (int k = 0; k < static_cast<int>(by_rank.size()); ++k) {
    const int si = pattern_s[by_rank[k]];
    key += (k ? ";" : "") + std::to_string(k + 1) + ":"
           + atom_edit_fields(props[si]);
  }
  key += "|";
  std::vector<BondEdit> edits;
  for (const RawEdit &e: raw_edits) {
    const int a = ordinal_of_s[e.a], b = ordinal_of_s[e.b];
    edits.push_back({ std::min(a, b), std::max(a, b), e.order });
  }
  std::sort(edits.begin(), edits.end(), [](const BondEdit &x, const BondEdit &y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  for (std::size_t i = 0; i < edits.size(); ++i) {
    key += (i ? ";" : "") + std::to_string(edits[i].a + 1) + "-"
           + std::to_string(edits[i].b + 1) + ":"
           + std::to_string(static_cast<int>(edits[i].order));
  }
  return SemiTemplate::from_key(key);
}

MolGraph apply_semi_template(const Synthon &synthon, const SemiTemplate &tpl) {
  return apply_semi_template(synthon.graph, tpl);
}

MolGraph apply_semi_template(const MolGraph &s, const SemiTemplate &tpl) {
  const auto &pattern = tpl.pattern();
  const MolGraph &t = tpl.graph();
  const int np = static_cast<int>(pattern.size());

  int attach_s = 0, attach_p = 0;
  for (const Atom &a: s.atoms())
    attach_s += a.attachment;
  for (const PatternAtom &p: pattern)
    attach_p += p.attachment;
  if (attach_s != attach_p)
    throw TemplateError(TemplateFailure::kPatternMismatch,
                        "attachment atom count differs from template anchors");

  const MolGraph p_graph = t.subgraph(tpl.pattern_index());
  chem::MatchOptions opt;
  opt.charge = false;
  opt.aromatic = false;
  opt.atom_filter = [&](int k, int x) {
    const PatternAtom &p = pattern[k];
    const Atom &a = s.atom(x);
    if (p.element != 0 && (p.element != a.element || p.aromatic != a.aromatic))
      return false;
    return p.open_valence == a.open_valence && p.attachment == a.attachment;
  };
  auto matches = chem::subgraph_match(p_graph, s, opt);
  if (matches.empty())
    throw TemplateError(TemplateFailure::kPatternMismatch,
                        "template pattern does not match synthon");
  std::vector<int> chosen = matches.front();
  if (matches.size() > 1) {
    chem::CanonicalOptions copt;
    copt.atom_maps = false;
    copt.stereo = false;
    const std::vector<int> ranks = chem::canonicalize(s, copt).ranks;
    auto rank_key = [&](const std::vector<int> &m) {
      std::vector<int> k(m.size());
      for (std::size_t i = 0; i < m.size(); ++i)
        k[i] = ranks[m[i]];
      return k;
    };
    auto best = rank_key(chosen);
    for (const auto &m: matches) {
      auto k = rank_key(m);
      if (k < best) {
        best = std::move(k);
        chosen = m;
      }
    }
  }

  // Units of new bonds per pattern ordinal.
  std::vector<int> new_units(np, 0);
  std::vector<int> ordinal_of_t(t.num_atoms(), -1);
  for (int k = 0; k < np; ++k)
    ordinal_of_t[tpl.pattern_index()[k]] = k;
  for (const chem::Bond &b: t.bonds()) {
    const int u = ordinal_of_t[b.begin], v = ordinal_of_t[b.end];
    if (u >= 0 && v >= 0)
      continue;
    const int units = chem::bond_valence_units(b.order);
    if (u >= 0)
      new_units[u] += units;
    if (v >= 0)
      new_units[v] += units;
  }
  for (const BondEdit &e: tpl.bond_edits()) {
    new_units[e.a] += chem::bond_valence_units(e.order);
    new_units[e.b] += chem::bond_valence_units(e.order);
  }

  MolGraph out = s;
  out.freeze_hydrogens();
  for (int k = 0; k < np; ++k) {
    const int x = chosen[k];
    const PatternAtom &p = pattern[k];
    const int hs = s.hydrogen_count(x) + s.atom(x).open_valence - new_units[k]
                   + p.h_delta;
    if (hs < 0)
      throw TemplateError(TemplateFailure::kInfeasible,
                          "negative hydrogen count after attachment");
    Atom &a = out.mutable_atom(x);
    a.explicit_hs = hs;
    a.formal_charge += p.charge_delta;
    if (p.aromatic_after >= 0)
      a.aromatic = p.aromatic_after == 1;
  }
  for (int i = 0; i < out.num_atoms(); ++i) {
    out.mutable_atom(i).open_valence = 0;
    out.mutable_atom(i).attachment = false;
  }

  std::vector<int> out_of_t(t.num_atoms(), -1);
  for (int k = 0; k < np; ++k)
    out_of_t[tpl.pattern_index()[k]] = chosen[k];
  for (int i = 0; i < t.num_atoms(); ++i) {
    if (ordinal_of_t[i] < 0)
      out_of_t[i] = out.add_atom(t.atom(i));
  }
  for (const chem::Bond &b: t.bonds()) {
    if (ordinal_of_t[b.begin] >= 0 && ordinal_of_t[b.end] >= 0)
      continue;
    out.add_bond(out_of_t[b.begin], out_of_t[b.end], b.order);
  }
  for (const BondEdit &e: tpl.bond_edits()) {
    const int u = chosen[e.a], v = chosen[e.b];
    if (out.find_bond(u, v) >= 0)
      throw TemplateError(TemplateFailure::kInfeasible,
                          "edited bond already present");
    out.add_bond(u, v, e.order);
  }
  for (int i = 0; i < out.num_atoms(); ++i) {
    if (!out.valence_ok(i))
      throw TemplateError(TemplateFailure::kInfeasible,
                          "valence violation after attachment");
  }
  return out;
}

}  // namespace semiretro::reaction
