//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/reaction/reaction.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include "semiretro/chem/smiles.h"

namespace semiretro::reaction {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
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

void check_unique_maps(const chem::MolGraph &g, const char *side) {
  std::set<int> seen;
  for (const chem::Atom &a: g.atoms()) {
    if (a.atom_map == 0)
      continue;
    if (!seen.insert(a.atom_map).second) {
      throw ReactionError("duplicate atom map " + std::to_string(a.atom_map)
                          + " on " + side + " side");
    }
  }
}

struct Image {
  int reactant = -1;
  int atom = -1;
};

std::unordered_map<int, Image> map_images(const Reaction &rxn) {
  std::unordered_map<int, Image> out;
  for (int r = 0; r < static_cast<int>(rxn.reactants.size()); ++r) {
    const chem::MolGraph &g = rxn.reactants[r];
    for (int i = 0; i < g.num_atoms(); ++i) {
      if (g.atom(i).atom_map > 0)
        out[g.atom(i).atom_map] = { r, i };
    }
  }
  return out;
}

}  // namespace

ReactionRecord parse_record(std::string_view line) {
  line = trim(line);
  const char sep = line.find('\t') != std::string_view::npos ? '\t' : ',';
  const auto fields = split(line, sep);
  if (fields.size() != 3)
    throw ReactionError("expected 3 fields (id, class, reaction)");
  ReactionRecord rec;
  rec.id = std::string(trim(fields[0]));
  std::string_view cls = trim(fields[1]);
  if (!cls.empty() && cls != "UNK" && cls != "unknown") {
    int value = 0;
    auto [ptr, ec] = std::from_chars(cls.data(), cls.data() + cls.size(), value);
    if (ec != std::errc() || ptr != cls.data() + cls.size() || value < 0)
      throw ReactionError("bad reaction class '" + std::string(cls) + "'");
    rec.reaction_class = value;
  }
  rec.smiles = std::string(trim(fields[2]));
  if (rec.smiles.empty())
    throw ReactionError("empty reaction SMILES");
  return rec;
}

bool is_header_line(std::string_view line) {
  line = trim(line);
  return line.starts_with("id,") || line.starts_with("id\t")
         || line.starts_with("\"id\"");
}

Reaction parse_reaction_smiles(std::string_view rxn, std::string id,
                               int reaction_class) {
  const auto parts = split(rxn, '>');
  if (parts.size() != 3)
    throw ReactionError("reaction SMILES must be 'reactants>agents>product'");

  chem::MolGraph reactant_side, product_side;
  try {
    reactant_side = chem::parse_smiles(parts[0]);
  } catch (const chem::SmilesError &e) {
    throw ReactionError(std::string("reactant side: ") + e.what());
  }
  try {
    product_side = chem::parse_smiles(parts[2]);
  } catch (const chem::SmilesError &e) {
    throw ReactionError(std::string("product side: ") + e.what());
  }
  if (product_side.empty())
    throw ReactionError("empty product");
  check_unique_maps(reactant_side, "reactant");
  check_unique_maps(product_side, "product");

  Reaction out;
  out.id = std::move(id);
  out.reaction_class = reaction_class;

  // The main product is the largest component.
  const auto product_parts = product_side.components();
  const auto *main = &product_parts.front();
  for (const auto &c: product_parts) {
    if (c.size() > main->size())
      main = &c;
  }
  out.product = product_side.subgraph(*main);

  std::set<int> product_maps;
  for (const chem::Atom &a: out.product.atoms()) {
    if (a.atom_map > 0)
      product_maps.insert(a.atom_map);
  }

  std::set<int> reactant_maps;
  for (const auto &c: reactant_side.components()) {
    bool contributes = false;
    for (int i: c) {
      const int m = reactant_side.atom(i).atom_map;
      if (m > 0) {
        reactant_maps.insert(m);
        contributes = contributes || product_maps.count(m) > 0;
      }
    }
    if (contributes)
      out.reactants.push_back(reactant_side.subgraph(c));
  }
  for (int m: product_maps) {
    if (!reactant_maps.count(m)) {
      throw ReactionError("product atom map " + std::to_string(m)
                          + " has no reactant image");
    }
  }
  if (out.reactants.empty())
    throw ReactionError("no reactant contributes to the product");
  return out;
}

Reaction parse_reaction(const ReactionRecord &record) {
  return parse_reaction_smiles(record.smiles, record.id, record.reaction_class);
}

Reaction parse_reaction(std::string_view line) {
  return parse_reaction(parse_record(line));
}

std::string format_record(const ReactionRecord &record) {
  return record.id + "," + std::to_string(record.reaction_class) + ","
         + record.smiles;
}

std::vector<ReactionRecord> read_records(const std::string &path,
                                         std::vector<LoadIssue> *issues) {
  std::ifstream in(path);
  if (!in)
    throw ReactionError("cannot open " + path);
  std::vector<ReactionRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty() || is_header_line(line))
      continue;
    try {
      out.push_back(parse_record(line));
    } catch (const ReactionError &e) {
      if (!issues)
        throw ReactionError(path + ":" + std::to_string(number) + ": " + e.what());
      issues->push_back({ number, e.what() });
    }
  }
  return out;
}

std::vector<Reaction> load_reactions(const std::vector<ReactionRecord> &records,
                                     std::vector<LoadIssue> *issues) {
  std::vector<Reaction> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      out.push_back(parse_reaction(records[i]));
    } catch (const ReactionError &e) {
      if (!issues)
        throw;
      issues->push_back({ i + 1, records[i].id + ": " + e.what() });
    }
  }
  return out;
}

std::vector<Center> CenterLabel::centers() const {
  std::vector<Center> out;
  for (const auto &[a, b]: bond_centers)
    out.push_back({ a, b });
  for (int a: atom_centers)
    out.push_back({ a, -1 });
  return out;
}

CenterLabel CenterLabel::from_center(const Center &c) {
  CenterLabel label;
  if (c.is_bond())
    label.bond_centers.push_back({ std::min(c.a, c.b), std::max(c.a, c.b) });
  else
    label.atom_centers.push_back(c.a);
  return label;
}

CenterLabel label_centers(const Reaction &rxn) {
  const chem::MolGraph &p = rxn.product;
  const auto images = map_images(rxn);

  std::vector<Image> image(p.num_atoms());
  std::unordered_map<int, int> product_of_map;
  for (int i = 0; i < p.num_atoms(); ++i) {
    const int m = p.atom(i).atom_map;
    if (m == 0)
      throw ReactionError("unmapped product atom " + std::to_string(i));
    const auto it = images.find(m);
    if (it == images.end())
      throw ReactionError("product atom map " + std::to_string(m)
                          + " has no reactant image");
    image[i] = it->second;
    product_of_map[m] = i;
  }

  CenterLabel label;
  for (const chem::Bond &b: p.bonds()) {
    const Image &u = image[b.begin];
    const Image &v = image[b.end];
    bool center = u.reactant != v.reactant;
    if (!center) {
      const chem::MolGraph &r = rxn.reactants[u.reactant];
      const int rb = r.find_bond(u.atom, v.atom);
      center = rb < 0 || r.bond(rb).order != b.order;
    }
    if (center)
      label.bond_centers.push_back({ std::min(b.begin, b.end),
                                     std::max(b.begin, b.end) });
  }
  if (!label.bond_centers.empty()) {
    std::sort(label.bond_centers.begin(), label.bond_centers.end());
    return label;
  }

  for (int i = 0; i < p.num_atoms(); ++i) {
    const chem::MolGraph &r = rxn.reactants[image[i].reactant];
    const int ri = image[i].atom;
    const chem::Atom &pa = p.atom(i);
    const chem::Atom &ra = r.atom(ri);
    bool center = pa.formal_charge != ra.formal_charge
                  || pa.aromatic != ra.aromatic
                  || p.hydrogen_count(i) != r.hydrogen_count(ri);
    for (const chem::Neighbor &nb: r.neighbors(ri)) {
      if (center)
        break;
      const auto it = product_of_map.find(r.atom(nb.atom).atom_map);
      // Residual neighbor, or a reactant bond the product lost.
      center = r.atom(nb.atom).atom_map == 0 || it == product_of_map.end()
               || p.find_bond(i, it->second) < 0;
    }
    if (center)
      label.atom_centers.push_back(i);
  }
  return label;
}

}  // namespace semiretro::reaction
