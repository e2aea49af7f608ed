//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semiretro/chem/element.h"
#include "semiretro/chem/smiles.h"

namespace semiretro::chem {

SmilesError::SmilesError(SmilesErrorKind kind, std::size_t offset,
                         const std::string &what)
    : std::runtime_error(what + " at offset " + std::to_string(offset)),
      kind_(kind), offset_(offset) { }

namespace {

// Placeholder in chiral_order for a ring bond whose partner is not known yet.
constexpr int kPendingRing = -3;

struct PendingBond {
  char symbol = 0;
  std::size_t offset = 0;
};

struct OpenRing {
  int atom;
  char symbol;
  std::size_t offset;
  std::size_t slot;
};

class SmilesParser {
public:
  explicit SmilesParser(std::string_view text): text_(text) { }

  MolGraph parse(const SmilesParseOptions &options);

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  MolGraph g_;
  std::vector<std::size_t> atom_offsets_;
  std::vector<std::vector<int>> order_;
  int prev_ = -1;
  std::optional<PendingBond> pending_;
  std::vector<std::pair<int, std::size_t>> branch_stack_;
  std::map<int, OpenRing> rings_;

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  [[noreturn]] void fail(SmilesErrorKind kind, std::size_t offset,
                         const std::string &what) const {
    throw SmilesError(kind, offset, what);
  }

  void add_atom(Atom atom, std::size_t offset, int hydrogen_slots);
  void connect(int a, int b, char symbol, std::size_t offset,
               bool a_is_begin = true);
  void ring_closure(int id, std::size_t offset);
  Atom parse_bracket(std::size_t start, int &hydrogen_slots);
  std::optional<Atom> parse_organic();
};

BondOrder order_for_symbol(char symbol, bool both_aromatic) {
  switch (symbol) {
  case '=':
    return BondOrder::kDouble;
  case '#':
    return BondOrder::kTriple;
  case ':':
    return BondOrder::kAromatic;
  case '-':
  case '/':
  case '\\':
    return BondOrder::kSingle;
  default:
    return both_aromatic ? BondOrder::kAromatic : BondOrder::kSingle;
  }
}

BondDir dir_for_symbol(char symbol) {
  if (symbol == '/')
    return BondDir::kUp;
  if (symbol == '\\')
    return BondDir::kDown;
  return BondDir::kNone;
}

void SmilesParser::connect(int a, int b, char symbol, std::size_t offset,
                           bool a_is_begin) {
  const bool both_aromatic = g_.atom(a).aromatic && g_.atom(b).aromatic;
  const BondOrder order = order_for_symbol(symbol, both_aromatic);
  if (g_.find_bond(a, b) >= 0)
    fail(SmilesErrorKind::kSyntax, offset, "duplicate bond");
  if (a_is_begin)
    g_.add_bond(a, b, order, dir_for_symbol(symbol));
  else
    g_.add_bond(b, a, order, dir_for_symbol(symbol));
}

void SmilesParser::add_atom(Atom atom, std::size_t offset,
                            int hydrogen_slots) {
  const int idx = g_.add_atom(std::move(atom));
  atom_offsets_.push_back(offset);
  order_.emplace_back();
  if (prev_ >= 0) {
    const char symbol = pending_ ? pending_->symbol : 0;
    connect(prev_, idx, symbol, offset);
    order_[prev_].push_back(idx);
    order_[idx].push_back(prev_);
  } else if (pending_) {
    fail(SmilesErrorKind::kSyntax, pending_->offset, "bond without atom");
  }
  if (hydrogen_slots > 0)
    order_[idx].push_back(kImplicitHydrogenNeighbor);
  pending_.reset();
  prev_ = idx;
}

void SmilesParser::ring_closure(int id, std::size_t offset) {
  if (prev_ < 0)
    fail(SmilesErrorKind::kSyntax, offset, "ring closure without atom");
  const char symbol = pending_ ? pending_->symbol : 0;
  pending_.reset();
  auto it = rings_.find(id);
  if (it == rings_.end()) {
    rings_[id] = { prev_, symbol, offset, order_[prev_].size() };
    order_[prev_].push_back(kPendingRing);
    return;
  }
  const OpenRing open = it->second;
  rings_.erase(it);
  if (open.atom == prev_)
    fail(SmilesErrorKind::kSyntax, offset, "ring closure to the same atom");
  if (open.symbol && symbol && open.symbol != symbol) {
    // '/' and '\' may legitimately differ between the two ends.
    const bool both_dir = (open.symbol == '/' || open.symbol == '\\')
                          && (symbol == '/' || symbol == '\\');
    if (!both_dir)
      fail(SmilesErrorKind::kSyntax, offset, "conflicting ring-closure bond");
  }
  if (open.symbol)
    connect(open.atom, prev_, open.symbol, offset, true);
  else
    connect(prev_, open.atom, symbol, offset, true);
  order_[open.atom][open.slot] = prev_;
  order_[prev_].push_back(open.atom);
}

std::optional<Atom> SmilesParser::parse_organic() {
  static constexpr std::pair<std::string_view, int> kTwoLetter[] = {
    { "Cl", 17 },
    { "Br", 35 },
  };
  Atom atom;
  for (const auto &[sym, z]: kTwoLetter) {
    if (text_.substr(pos_, 2) == sym) {
      atom.element = z;
      pos_ += 2;
      return atom;
    }
  }
  const char c = peek();
  switch (c) {
  case 'B':
    atom.element = 5;
    break;
  case 'C':
    atom.element = 6;
    break;
  case 'N':
    atom.element = 7;
    break;
  case 'O':
    atom.element = 8;
    break;
  case 'P':
    atom.element = 15;
    break;
  case 'S':
    atom.element = 16;
    break;
  case 'F':
    atom.element = 9;
    break;
  case 'I':
    atom.element = 53;
    break;
  case '*':
    atom.element = kWildcard;
    atom.explicit_hs = 0;
    break;
  case 'b':
  case 'c':
  case 'n':
  case 'o':
  case 'p':
  case 's':
    atom.element = element_from_symbol(
        std::string(1, static_cast<char>(std::toupper(c))));
    atom.aromatic = true;
    break;
  default:
    return std::nullopt;
  }
  ++pos_;
  return atom;
}

Atom SmilesParser::parse_bracket(std::size_t start, int &hydrogen_slots) {
  ++pos_;  // '['
  Atom atom;
  atom.explicit_hs = 0;

  int isotope = 0;
  bool has_isotope = false;
  while (std::isdigit(static_cast<unsigned char>(peek()))) {
    isotope = isotope * 10 + (peek() - '0');
    has_isotope = true;
    ++pos_;
  }
  if (has_isotope)
    atom.isotope = isotope;

  const std::size_t sym_start = pos_;
  if (peek() == '*') {
    atom.element = kWildcard;
    ++pos_;
  } else if (std::islower(static_cast<unsigned char>(peek()))) {
    static constexpr std::string_view kAromatic[] = { "se", "as", "te", "b",
                                                      "c",  "n",  "o",  "p",
                                                      "s" };
    bool found = false;
    for (std::string_view sym: kAromatic) {
      if (text_.substr(pos_, sym.size()) == sym) {
        std::string upper(sym);
        upper[0] = static_cast<char>(std::toupper(upper[0]));
        atom.element = element_from_symbol(upper);
        atom.aromatic = true;
        pos_ += sym.size();
        found = true;
        break;
      }
    }
    if (!found)
      fail(SmilesErrorKind::kUnknownElement, sym_start, "unknown element");
  } else if (std::isupper(static_cast<unsigned char>(peek()))) {
    int z = -1;
    if (std::islower(static_cast<unsigned char>(peek(1)))) {
      z = element_from_symbol(text_.substr(pos_, 2));
      if (z >= 0)
        pos_ += 2;
    }
    if (z < 0) {
      z = element_from_symbol(text_.substr(pos_, 1));
      if (z < 0)
        fail(SmilesErrorKind::kUnknownElement, sym_start, "unknown element");
      ++pos_;
    }
    atom.element = z;
  } else {
    fail(SmilesErrorKind::kUnknownElement, sym_start, "unknown element");
  }

  if (peek() == '@') {
    ++pos_;
    if (peek() == '@') {
      ++pos_;
      atom.chirality = Chirality::kClockwise;
    } else if (text_.substr(pos_, 3) == "TH1") {
      pos_ += 3;
      atom.chirality = Chirality::kCounterClockwise;
    } else if (text_.substr(pos_, 3) == "TH2") {
      pos_ += 3;
      atom.chirality = Chirality::kClockwise;
    } else {
      atom.chirality = Chirality::kCounterClockwise;
    }
  }

  if (peek() == 'H') {
    ++pos_;
    int h = 1;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      h = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        h = h * 10 + (peek() - '0');
        ++pos_;
      }
    }
    atom.explicit_hs = h;
  }

  if (peek() == '+' || peek() == '-') {
    const char sign = peek();
    const int unit = sign == '+' ? 1 : -1;
    ++pos_;
    int magnitude = 1;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      magnitude = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        magnitude = magnitude * 10 + (peek() - '0');
        ++pos_;
      }
    } else {
      while (peek() == sign) {
        ++magnitude;
        ++pos_;
      }
    }
    atom.formal_charge = unit * magnitude;
  }

  if (peek() == ':') {
    ++pos_;
    if (!std::isdigit(static_cast<unsigned char>(peek())))
      fail(SmilesErrorKind::kSyntax, pos_, "expected atom map number");
    int map = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      map = map * 10 + (peek() - '0');
      ++pos_;
    }
    atom.atom_map = map;
  }

  if (peek() != ']')
    fail(SmilesErrorKind::kSyntax, at_end() ? text_.size() : pos_,
         "unterminated bracket atom");
  ++pos_;
  (void)start;
  hydrogen_slots = *atom.explicit_hs;
  return atom;
}

MolGraph SmilesParser::parse(const SmilesParseOptions &options) {
  while (!at_end()) {
    const std::size_t here = pos_;
    const char c = peek();
    if (c == '(') {
      if (prev_ < 0)
        fail(SmilesErrorKind::kSyntax, here, "branch without atom");
      branch_stack_.push_back({ prev_, here });
      ++pos_;
    } else if (c == ')') {
      if (branch_stack_.empty())
        fail(SmilesErrorKind::kUnbalancedParenthesis, here,
             "unbalanced parenthesis");
      if (pending_)
        fail(SmilesErrorKind::kSyntax, pending_->offset, "dangling bond");
      prev_ = branch_stack_.back().first;
      branch_stack_.pop_back();
      ++pos_;
    } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/'
               || c == '\\') {
      if (pending_)
        fail(SmilesErrorKind::kSyntax, here, "consecutive bond symbols");
      pending_ = PendingBond { c, here };
      ++pos_;
    } else if (c == '$') {
      fail(SmilesErrorKind::kSyntax, here, "quadruple bonds not supported");
    } else if (c == '.') {
      if (pending_)
        fail(SmilesErrorKind::kSyntax, pending_->offset, "dangling bond");
      if (!branch_stack_.empty())
        fail(SmilesErrorKind::kUnbalancedParenthesis, here,
             "unbalanced parenthesis");
      prev_ = -1;
      ++pos_;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      ++pos_;
      ring_closure(c - '0', here);
    } else if (c == '%') {
      if (!std::isdigit(static_cast<unsigned char>(peek(1)))
          || !std::isdigit(static_cast<unsigned char>(peek(2))))
        fail(SmilesErrorKind::kSyntax, here, "malformed %nn ring closure");
      const int id = (peek(1) - '0') * 10 + (peek(2) - '0');
      pos_ += 3;
      ring_closure(id, here);
    } else if (c == '[') {
      int hydrogen_slots = 0;
      Atom atom = parse_bracket(here, hydrogen_slots);
      add_atom(std::move(atom), here, hydrogen_slots);
    } else {
      std::optional<Atom> atom = parse_organic();
      if (!atom)
        fail(SmilesErrorKind::kUnknownElement, here, "unknown element token");
      add_atom(std::move(*atom), here, 0);
    }
  }

  if (!branch_stack_.empty())
    fail(SmilesErrorKind::kUnbalancedParenthesis, text_.size(),
         "unbalanced parenthesis");
  if (!rings_.empty())
    fail(SmilesErrorKind::kUnmatchedRingClosure, rings_.begin()->second.offset,
         "unmatched ring-closure digit");
  if (pending_)
    fail(SmilesErrorKind::kSyntax, pending_->offset, "dangling bond");

  for (int i = 0; i < g_.num_atoms(); ++i) {
    if (g_.atom(i).chirality != Chirality::kNone)
      g_.mutable_atom(i).chiral_order = std::move(order_[i]);
  }

  for (int i = 0; i < g_.num_atoms(); ++i) {
    const Atom &a = g_.atom(i);
    // Aromatic flags and bonds must agree; wildcards take any bond.
    if (a.aromatic || a.element == kWildcard)
      continue;
    for (const Neighbor &n: g_.neighbors(i)) {
      if (g_.bond(n.bond).order == BondOrder::kAromatic)
        fail(SmilesErrorKind::kSyntax, atom_offsets_[i],
             "aromatic bond on non-aromatic atom");
    }
  }

  if (options.check_valence) {
    for (int i = 0; i < g_.num_atoms(); ++i) {
      if (!g_.valence_ok(i))
        fail(SmilesErrorKind::kValenceViolation, atom_offsets_[i],
             "valence violation");
    }
  }

  if (!options.dummies_as_open_valence)
    return std::move(g_);

  std::vector<int> keep;
  std::vector<int> extra_open(g_.num_atoms(), 0);
  for (int i = 0; i < g_.num_atoms(); ++i) {
    const Atom &a = g_.atom(i);
    const bool dummy = a.element == kWildcard && a.atom_map == 0
                       && a.formal_charge == 0 && g_.degree(i) == 1
                       && g_.atom(g_.neighbors(i)[0].atom).element
                              != kWildcard;
    if (dummy) {
      const Neighbor n = g_.neighbors(i)[0];
      extra_open[n.atom] += bond_valence_units(g_.bond(n.bond).order);
    } else {
      keep.push_back(i);
    }
  }
  MolGraph out = g_.subgraph(keep);
  for (int i = 0; i < out.num_atoms(); ++i) {
    const int old = keep[i];
    if (extra_open[old] > 0) {
      Atom &a = out.mutable_atom(i);
      // Keep the hydrogen count the dummy-bearing atom had.
      if (!a.explicit_hs)
        a.explicit_hs = g_.hydrogen_count(old);
      a.open_valence += extra_open[old];
      a.attachment = true;
    }
  }
  return out;
}

}  // namespace

MolGraph parse_smiles(std::string_view text,
                      const SmilesParseOptions &options) {
  SmilesParser parser(text);
  return parser.parse(options);
}

}  // namespace semiretro::chem
