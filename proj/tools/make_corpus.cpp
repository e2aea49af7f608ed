//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

// Generates an atom-mapped reaction corpus from building blocks. Block SMILES
// mark the reacting atom with map 1 and the atom of the group it loses with
// map 9 (maps 2 and 8 for a second site); the marks are cleared before use.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semiretro/chem/canonical.h"
#include "semiretro/chem/smiles.h"

namespace {

using semiretro::chem::BondOrder;
using semiretro::chem::MolGraph;

const std::vector<std::string> kAmines = {
  "[NH2:1]c1ccccc1", "[NH2:1]c1ccc(F)cc1", "[NH2:1]c1ccc(Cl)cc1",
  "[NH2:1]c1ccc(OC)cc1", "[NH2:1]c1cccc(C(F)(F)F)c1", "[NH2:1]c1ccncc1",
  "[NH2:1]c1cccnc1", "[NH2:1]Cc1ccccc1", "[NH2:1]CCc1ccccc1", "[NH2:1]C1CC1",
  "[NH2:1]C1CCCCC1", "[NH2:1]CC(C)C", "[NH2:1]CCO", "[NH2:1]CCOC",
  "[NH2:1]C(C)(C)C", "C[C@H]([NH2:1])c1ccccc1", "C[C@@H]([NH2:1])c1ccccc1",
  "[NH2:1]c1ccc2c(c1)OCO2", "[NH2:1]c1nccs1", "[NH2:1]c1ccc(cc1)C#N",
  "[NH2:1]Cc1ccco1", "[NH2:1]CCN1CCOCC1", "[NH2:1]c1ccc(cc1)C(=O)OC",
  "[NH2:1]C1CCN(CC1)C(=O)OC(C)(C)C", "O[C@H]1CC[C@H]([NH2:1])CC1",
  "[NH2:1]c1cc(C)ccc1C", "[NH2:1]Cc1ccc(Cl)cc1", "[NH2:1]c1cnc2ccccc2c1",
  "C1CC[NH:1]CC1", "C1COCC[NH:1]1", "CN1CC[NH:1]CC1", "C1CC[NH:1]C1",
  "C[NH:1]Cc1ccccc1", "C[NH:1]C", "CC(C)(C)OC(=O)N1CC[NH:1]CC1",
  "c1ccc2c(c1)CC[NH:1]C2", "Fc1ccc(cc1)C1CC[NH:1]CC1", "C[NH:1]c1ccccc1",
  "OC1CC[NH:1]CC1", "C[C@@H]1CCC[NH:1]1",
};

const std::vector<std::string> kAcylGroups = {
  "c1ccccc1", "c1ccc(F)cc1", "c1ccc(Cl)cc1", "c1ccc(C)cc1", "c1ccc(OC)cc1",
  "c1ccncc1", "c1cccnc1", "c1ccco1", "c1cccs1", "C", "CC", "C1CC1",
  "C1CCCCC1", "C(C)C", "Cc1ccccc1", "c1ccc2ccccc2c1",
  "c1ccc(cc1)[N+](=O)[O-]", "c1cc(Cl)ccc1Cl", "CCCC", "C=C", "c1cnn(C)c1",
  "c1ccc(cc1)C(F)(F)F", "[C@@H]1CCCN1C(=O)OC(C)(C)C", "c1ccc(cc1)-c1ccccc1",
  "COc1ccccc1", "c1cc2ccccc2o1", "Cc1noc(C)c1",
};

const std::vector<std::string> kArylGroups = {
  "c1ccccc1", "c1ccc(C)cc1", "c1ccc(OC)cc1", "c1ccc(cc1)C#N", "c1cccnc1",
  "c1ccc(F)cc1", "c1ccc2ccccc2c1", "c1cccs1", "c1ccc(cc1)C(=O)OC",
  "c1cc(F)cc(F)c1", "c1ccc(nc1)N", "c1ccc2ncccc2c1", "c1ccc(cc1)C(F)(F)F",
  "c1ccccc1C", "c1ccc(cc1)S(C)(=O)=O", "c1cnc(nc1)C", "c1ccc(cc1)OC(F)(F)F",
};

const std::vector<std::string> kBoronic = {
  "O[B:9](O)[c:1]1ccccc1", "O[B:9](O)[c:1]1ccc(C)cc1",
  "O[B:9](O)[c:1]1ccc(OC)cc1", "O[B:9](O)[c:1]1cccnc1",
  "O[B:9](O)[c:1]1ccc(F)cc1", "O[B:9](O)[c:1]1ccco1",
  "O[B:9](O)[c:1]1cccs1", "O[B:9](O)[c:1]1ccc(cc1)C(=O)O",
  "O[B:9](O)[c:1]1cnn(C)c1", "O[B:9](O)[c:1]1ccc2OCOc2c1",
  "O[B:9](O)[c:1]1ccc(cc1)C#N", "O[B:9](O)[c:1]1cccc(Cl)c1",
  "CC1(C)OB([c:1]2ccccc2)OC1(C)C",
};

const std::vector<std::string> kAlkynes = {
  "[CH:1]#Cc1ccccc1", "[CH:1]#CC(C)(C)O", "[CH:1]#C[Si](C)(C)C",
  "[CH:1]#CCO", "[CH:1]#CC1CC1", "[CH:1]#Cc1ccc(C)cc1", "[CH:1]#CCN(C)C",
};

const std::vector<std::string> kSnArElectrophiles = {
  "[Cl:9][c:1]1ncccn1", "[F:9][c:1]1ccc(cc1)[N+](=O)[O-]",
  "[Cl:9][c:1]1ccnc2ccccc12", "[Cl:9][c:1]1nccs1", "[Cl:9][c:1]1ncnc2[nH]ccc12",
  "[Cl:9][c:1]1cc(ncn1)N", "[Cl:9][c:1]1nc2ccccc2o1",
  "[Cl:9][c:1]1ccc(cn1)C(F)(F)F", "[Cl:9][c:1]1nc(Cl)ncc1",
  "[F:9][c:1]1ccc(cc1C#N)C", "[Cl:9][c:1]1ncc(cc1)[N+](=O)[O-]",
  "[Cl:9][c:1]1nc2ccccc2[nH]1", "[Cl:9][c:1]1ccc2ncccc2n1",
};

const std::vector<std::string> kAlkylElectrophiles = {
  "[Br:9][CH2:1]c1ccccc1", "[Br:9][CH2:1]c1ccc(F)cc1", "[Cl:9][CH2:1]c1ccccn1",
  "[I:9][CH3:1]", "[Br:9][CH2:1]C", "[Br:9][CH2:1]CC", "[Br:9][CH2:1]C(=O)OCC",
  "[Br:9][CH2:1]CCCl", "[Br:9][CH2:1]C1CC1", "[Br:9][CH2:1]C=C",
  "[Br:9][CH2:1]C#C", "[Cl:9][CH2:1]C(=O)N(C)C", "[Br:9][CH:1](C)C",
  "CS(=O)(=O)[O:9][CH2:1]CCc1ccccc1", "[Br:9][CH2:1]c1ccc(cc1)C#N",
  "[Br:9][CH2:1]CCCN1C(=O)c2ccccc2C1=O", "[I:9][CH2:1]CC(F)(F)F",
  "[Br:9][CH2:1]c1ccc(cc1)OC", "[Cl:9][CH2:1]c1ccc(Cl)cc1",
};

// Extra N and O nucleophiles for alkylation.
const std::vector<std::string> kHeteroNucleophiles = {
  "[OH:1]c1ccccc1", "[OH:1]c1ccc(Cl)cc1", "[OH:1]c1ccc(cc1)C=O",
  "[OH:1]c1cccc(OC)c1", "[OH:1]c1ccc2ccccc2c1", "[OH:1]c1ccc(cc1)C(=O)OC",
  "[OH:1]c1ccc(F)cc1F", "[OH:1]c1cc(C)ccc1", "[OH:1]CCN1CCCC1",
  "[OH:1]c1ccc(cc1)C#N", "[nH:1]1cccn1", "c1ccc2c(c1)cc[nH:1]2",
  "[nH:1]1ccnc1", "O=C1[NH:1]C(=O)c2ccccc12", "[nH:1]1nnc2ccccc12",
  "Cc1cc(C)[nH:1]n1",
};

const std::vector<std::string> kCarbonyls = {
  "[O:9]=[CH:1]c1ccccc1", "[O:9]=[CH:1]c1ccc(F)cc1", "[O:9]=[CH:1]c1ccncc1",
  "[O:9]=[CH:1]C1CCCCC1", "[O:9]=[CH:1]c1ccco1", "[O:9]=[CH:1]CC(C)C",
  "[O:9]=[CH:1]c1ccc(cc1)OC", "[O:9]=[CH:1]c1cccs1", "[O:9]=[C:1]1CCCCC1",
  "C[C:1](=[O:9])c1ccccc1", "[O:9]=[C:1]1CCN(CC1)C(=O)OC(C)(C)C",
  "[O:9]=[CH:1]c1ccc2ccccc2c1", "CC[C:1](=[O:9])CC",
};

const std::vector<std::string> kSulfonylChlorides = {
  "[Cl:9][S:1](=O)(=O)c1ccccc1", "[Cl:9][S:1](=O)(=O)c1ccc(C)cc1",
  "[Cl:9][S:1](=O)(=O)C", "[Cl:9][S:1](=O)(=O)c1cccs1",
  "[Cl:9][S:1](=O)(=O)c1ccc(F)cc1", "[Cl:9][S:1](=O)(=O)c1ccc(cc1)OC",
  "[Cl:9][S:1](=O)(=O)CC", "[Cl:9][S:1](=O)(=O)c1cccc2ccccc12",
  "[Cl:9][S:1](=O)(=O)c1cn(C)cn1",
};

const std::vector<std::string> kDihalides = {
  "[Br:9][CH2:1]CC[CH2:2][Br:8]", "[Br:9][CH2:1]CCC[CH2:2][Br:8]",
  "[Br:9][CH2:1]COC[CH2:2][Br:8]", "[Cl:9][CH2:1]c1ccccc1[CH2:2][Cl:8]",
};

// Ester alkyl prefixes; the alkyl atom bonded to oxygen is the leaving mark.
const std::vector<std::string> kEsterAlkyls = {
  "[CH3:9][O:1]", "C[CH2:9][O:1]", "C[C:9](C)(C)[O:1]", "c1ccccc1[CH2:9][O:1]",
};

struct Block {
  MolGraph g;
  int a = -1, leave = -1, a2 = -1, leave2 = -1;
};

Block load(const std::string &smiles) {
  Block b;
  b.g = semiretro::chem::parse_smiles(smiles);
  for (int i = 0; i < b.g.num_atoms(); ++i) {
    auto &atom = b.g.mutable_atom(i);
    switch (atom.atom_map) {
    case 1: b.a = i; break;
    case 9: b.leave = i; break;
    case 2: b.a2 = i; break;
    case 8: b.leave2 = i; break;
    default: break;
    }
    atom.atom_map = 0;
  }
  b.g.freeze_hydrogens();
  return b;
}

// Atoms still connected to `keep` once the listed bonds are ignored.
std::vector<int> kept_atoms(const MolGraph &g, int keep,
                            const std::vector<std::pair<int, int>> &cuts) {
  MolGraph h = g;
  for (auto [x, y]: cuts) {
    if (x >= 0 && y >= 0)
      h.remove_bond(h.find_bond(x, y));
  }
  for (const auto &c: h.components()) {
    if (std::find(c.begin(), c.end(), keep) != c.end())
      return c;
  }
  return {};
}

int units(const MolGraph &g, int x, int y) {
  return semiretro::chem::bond_valence_units(g.bond(g.find_bond(x, y)).order);
}

class Generator {
public:
  explicit Generator(unsigned seed): rng_(seed) { }

  template <class T>
  const T &pick(const std::vector<T> &v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
  }

  std::mt19937_64 &rng() { return rng_; }

  // Product = reactant pieces kept, bonds added, hydrogens adjusted. Pieces
  // are (reactant, kept atom list); `edits` holds per-reactant atom hydrogen
  // and charge changes; `bonds` connect (reactant, atom) pairs.
  struct Site {
    int reactant;
    int atom;
  };
  struct NewBond {
    Site u, v;
    BondOrder order;
  };
  struct AtomEdit {
    Site s;
    int dh = 0;
    int dcharge = 0;
  };

  bool emit(std::vector<MolGraph> reactants,
            const std::vector<std::vector<int>> &kept,
            const std::vector<NewBond> &bonds, const std::vector<AtomEdit> &edits,
            const std::vector<NewBond> &order_changes, std::string &out) {
    MolGraph product;
    std::vector<std::vector<int>> index(reactants.size());
    for (std::size_t r = 0; r < reactants.size(); ++r) {
      index[r].assign(reactants[r].num_atoms(), -1);
      const MolGraph part = reactants[r].subgraph(kept[r]);
      const int offset = product.append(part);
      for (std::size_t k = 0; k < kept[r].size(); ++k)
        index[r][kept[r][k]] = offset + static_cast<int>(k);
    }
    for (const AtomEdit &e: edits) {
      auto &atom = product.mutable_atom(index[e.s.reactant][e.s.atom]);
      atom.explicit_hs = *atom.explicit_hs + e.dh;
      atom.formal_charge += e.dcharge;
      if (*atom.explicit_hs < 0)
        return false;
    }
    for (const NewBond &b: bonds) {
      const int x = index[b.u.reactant][b.u.atom];
      const int y = index[b.v.reactant][b.v.atom];
      if (x < 0 || y < 0 || product.find_bond(x, y) >= 0)
        return false;
      product.add_bond(x, y, b.order);
    }
    for (const NewBond &b: order_changes) {
      const int bond = product.find_bond(index[b.u.reactant][b.u.atom],
                                         index[b.v.reactant][b.v.atom]);
      if (bond < 0)
        return false;
      product.set_bond_order(bond, b.order);
    }
    for (int i = 0; i < product.num_atoms(); ++i) {
      if (!product.valence_ok(i))
        return false;
    }

    // Random map numbers on product atoms and their reactant images.
    std::vector<int> maps(product.num_atoms());
    std::iota(maps.begin(), maps.end(), 1);
    std::shuffle(maps.begin(), maps.end(), rng_);
    for (int i = 0; i < product.num_atoms(); ++i)
      product.mutable_atom(i).atom_map = maps[i];
    for (std::size_t r = 0; r < reactants.size(); ++r) {
      for (int i = 0; i < reactants[r].num_atoms(); ++i) {
        const int p = index[r][i];
        reactants[r].mutable_atom(i).atom_map = p >= 0 ? maps[p] : 0;
      }
    }

    std::vector<std::string> parts;
    for (const auto &r: reactants)
      parts.push_back(semiretro::chem::canonical_smiles(r));
    std::sort(parts.begin(), parts.end());
    out.clear();
    for (std::size_t i = 0; i < parts.size(); ++i)
      out += (i ? "." : "") + parts[i];
    out += ">>" + semiretro::chem::canonical_smiles(product);
    return true;
  }

private:
  std::mt19937_64 rng_;
};

using Site = Generator::Site;

// A(a, leaving group) + B(b, leaving group or H) -> A-B.
bool couple(Generator &gen, const Block &x, const Block &y, BondOrder order,
            std::string &out) {
  const int u = semiretro::chem::bond_valence_units(order);
  const auto kx = kept_atoms(x.g, x.a, { { x.a, x.leave } });
  const auto ky = kept_atoms(y.g, y.a, { { y.a, y.leave } });
  const int cut_x = x.leave >= 0 ? units(x.g, x.a, x.leave) : 0;
  const int cut_y = y.leave >= 0 ? units(y.g, y.a, y.leave) : 0;
  return gen.emit({ x.g, y.g }, { kx, ky }, { { { 0, x.a }, { 1, y.a }, order } },
                  { { { 0, x.a }, cut_x - u, 0 }, { { 1, y.a }, cut_y - u, 0 } },
                  {}, out);
}

// Removes the group on `leave` from atom a, replacing it with hydrogen.
bool cleave(Generator &gen, const Block &m, std::string &out) {
  const auto k = kept_atoms(m.g, m.a, { { m.a, m.leave } });
  return gen.emit({ m.g }, { k }, {},
                  { { { 0, m.a }, units(m.g, m.a, m.leave), 0 } }, {}, out);
}

bool nitro_reduction(Generator &gen, const Block &m, std::string &out) {
  std::vector<int> keep;
  for (int i = 0; i < m.g.num_atoms(); ++i) {
    const bool oxygen_on_n = m.g.atom(i).element == 8 && m.g.find_bond(i, m.a) >= 0;
    if (!oxygen_on_n)
      keep.push_back(i);
  }
  return gen.emit({ m.g }, { keep }, {},
                  { { { 0, m.a }, 2, -m.g.atom(m.a).formal_charge } }, {}, out);
}

// C=O to CH-OH; both atoms stay in one reactant.
bool carbonyl_reduction(Generator &gen, const Block &m, std::string &out) {
  std::vector<int> all(m.g.num_atoms());
  std::iota(all.begin(), all.end(), 0);
  return gen.emit({ m.g }, { all }, {},
                  { { { 0, m.a }, 1, 0 }, { { 0, m.leave }, 1, 0 } },
                  { { { 0, m.a }, { 0, m.leave }, BondOrder::kSingle } }, out);
}

bool ring_alkylation(Generator &gen, const Block &d, const Block &amine,
                     std::string &out) {
  const auto kd = kept_atoms(d.g, d.a, { { d.a, d.leave }, { d.a2, d.leave2 } });
  std::vector<int> ka(amine.g.num_atoms());
  std::iota(ka.begin(), ka.end(), 0);
  return gen.emit({ d.g, amine.g }, { kd, ka },
                  { { { 0, d.a }, { 1, amine.a }, BondOrder::kSingle },
                    { { 0, d.a2 }, { 1, amine.a }, BondOrder::kSingle } },
                  { { { 1, amine.a }, -2, 0 } }, {}, out);
}

std::string acid(const std::string &group) {
  return "[OH:9][C:1](=O)" + group;
}

std::string replace_once(std::string s, const std::string &from, const std::string &to) {
  const auto pos = s.find(from);
  if (pos != std::string::npos)
    s.replace(pos, from.size(), to);
  return s;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app { "Generate an atom-mapped reaction corpus" };
  std::string out_path = "mini_corpus.csv";
  int count = 1500;
  unsigned seed = 20260101;
  app.add_option("-o,--out", out_path, "output CSV");
  app.add_option("-n,--count", count, "number of reactions");
  app.add_option("--seed", seed, "random seed");
  CLI11_PARSE(app, argc, argv);

  Generator gen(seed);
  std::vector<std::string> arylBr, arylI, nitro, esters, boc_amines, primary;
  for (const auto &g: kArylGroups) {
    arylBr.push_back("[Br:9][c:1]" + g.substr(1));
    arylI.push_back("[I:9][c:1]" + g.substr(1));
    nitro.push_back("[O-][N+:1](=O)" + g);
  }
  for (const auto &g: kAcylGroups) {
    for (const auto &alkyl: kEsterAlkyls)
      esters.push_back(alkyl + "C(=O)" + g);
  }
  for (const auto &a: kAmines) {
    if (a.find("[NH2:1]") != std::string::npos) {
      primary.push_back(a);
      boc_amines.push_back(replace_once(a, "[NH2:1]", "[NH:1]([C:9](=O)OC(C)(C)C)"));
    } else {
      boc_amines.push_back(replace_once(a, "[NH:1]", "[N:1]([C:9](=O)OC(C)(C)C)"));
    }
  }

  struct Kind {
    const char *name;
    int reaction_class;
    double weight;
  };
  const std::vector<Kind> kinds = {
    { "amide", 2, 18 }, { "acid_chloride", 2, 6 }, { "sulfonamide", 2, 6 },
    { "n_alkylation", 1, 8 }, { "o_alkylation", 1, 7 }, { "snar", 1, 8 },
    { "buchwald", 1, 6 }, { "suzuki", 3, 10 }, { "sonogashira", 3, 3 },
    { "boc_protection", 5, 5 }, { "boc_deprotection", 6, 8 },
    { "ester_hydrolysis", 6, 5 }, { "nitro_reduction", 7, 4 },
    { "reductive_amination", 1, 4 }, { "acid_chlorination", 9, 2 },
    { "carbonyl_reduction", 7, 2 }, { "ring_alkylation", 1, 1 },
  };
  std::vector<double> weights;
  for (const auto &k: kinds)
    weights.push_back(k.weight);
  std::discrete_distribution<int> kind_d(weights.begin(), weights.end());

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 1;
  }
  out << "id,class,reactants>reagents>production\n";

  std::set<std::string> seen;
  int written = 0, attempts = 0;
  while (written < count && attempts < count * 50) {
    ++attempts;
    const Kind &kind = kinds[kind_d(gen.rng())];
    const std::string name = kind.name;
    std::string rxn;
    bool ok = false;
    try {
      if (name == "amide") {
        ok = couple(gen, load(acid(gen.pick(kAcylGroups))), load(gen.pick(kAmines)),
                    BondOrder::kSingle, rxn);
      } else if (name == "acid_chloride") {
        ok = couple(gen,
                    load(replace_once(acid(gen.pick(kAcylGroups)), "[OH:9]", "[Cl:9]")),
                    load(gen.pick(kAmines)), BondOrder::kSingle, rxn);
      } else if (name == "sulfonamide") {
        ok = couple(gen, load(gen.pick(kSulfonylChlorides)), load(gen.pick(kAmines)),
                    BondOrder::kSingle, rxn);
      } else if (name == "n_alkylation") {
        ok = couple(gen, load(gen.pick(kAlkylElectrophiles)), load(gen.pick(kAmines)),
                    BondOrder::kSingle, rxn);
      } else if (name == "o_alkylation") {
        ok = couple(gen, load(gen.pick(kAlkylElectrophiles)),
                    load(gen.pick(kHeteroNucleophiles)), BondOrder::kSingle, rxn);
      } else if (name == "snar") {
        ok = couple(gen, load(gen.pick(kSnArElectrophiles)), load(gen.pick(kAmines)),
                    BondOrder::kSingle, rxn);
      } else if (name == "buchwald") {
        ok = couple(gen, load(gen.pick(arylBr)), load(gen.pick(kAmines)),
                    BondOrder::kSingle, rxn);
      } else if (name == "suzuki") {
        ok = couple(gen, load(gen.pick(arylBr)), load(gen.pick(kBoronic)),
                    BondOrder::kSingle, rxn);
      } else if (name == "sonogashira") {
        ok = couple(gen, load(gen.pick(arylI)), load(gen.pick(kAlkynes)),
                    BondOrder::kSingle, rxn);
      } else if (name == "boc_protection") {
        ok = couple(gen, load("CC(C)(C)O[C:1](=O)[O:9]C(=O)OC(C)(C)C"),
                    load(gen.pick(kAmines)), BondOrder::kSingle, rxn);
      } else if (name == "boc_deprotection") {
        ok = cleave(gen, load(gen.pick(boc_amines)), rxn);
      } else if (name == "ester_hydrolysis") {
        ok = cleave(gen, load(gen.pick(esters)), rxn);
      } else if (name == "nitro_reduction") {
        ok = nitro_reduction(gen, load(gen.pick(nitro)), rxn);
      } else if (name == "reductive_amination") {
        ok = couple(gen, load(gen.pick(kCarbonyls)), load(gen.pick(kAmines)),
                    BondOrder::kSingle, rxn);
      } else if (name == "acid_chlorination") {
        ok = couple(gen, load(acid(gen.pick(kAcylGroups))), load("O=[S:9][Cl:1]Cl"),
                    BondOrder::kSingle, rxn);
      } else if (name == "carbonyl_reduction") {
        ok = carbonyl_reduction(gen, load(gen.pick(kCarbonyls)), rxn);
      } else if (name == "ring_alkylation") {
        ok = ring_alkylation(gen, load(gen.pick(kDihalides)), load(gen.pick(primary)), rxn);
      }
    } catch (const std::exception &e) {
      std::cerr << name << ": " << e.what() << "\n";
      ok = false;
    }
    if (!ok)
      continue;
    // Deduplicate on the map-free reaction.
    const auto arrow = rxn.find(">>");
    const std::string key =
        semiretro::chem::molecule_key(semiretro::chem::parse_smiles(rxn.substr(0, arrow)))
        + ">>"
        + semiretro::chem::molecule_key(semiretro::chem::parse_smiles(rxn.substr(arrow + 2)));
    if (!seen.insert(key).second)
      continue;
    ++written;
    char id[32];
    std::snprintf(id, sizeof id, "syn%05d", written);
    out << id << "," << kind.reaction_class << "," << rxn << "\n";
  }
  std::cerr << "wrote " << written << " reactions in " << attempts << " attempts\n";
  return written == count ? 0 : 1;
}
