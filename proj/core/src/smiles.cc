#include "chemserve/smiles.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <vector>

#include "chemserve/canon.h"
#include "chemserve/error.h"

namespace chemserve {
namespace {

bool organic_subset(std::string_view symbol) {
  static constexpr std::string_view kOrganic[] = {"B", "C",  "N",  "O", "P",
                                                  "S", "F",  "Cl", "Br", "I"};
  return std::find(std::begin(kOrganic), std::end(kOrganic), symbol)
         != std::end(kOrganic);
}

bool aromatic_capable(std::string_view symbol) {
  static constexpr std::string_view kAromatic[] = {"B", "C", "N", "O",
                                                   "P", "S", "Se"};
  return std::find(std::begin(kAromatic), std::end(kAromatic), symbol)
         != std::end(kAromatic);
}

struct PendingBond {
  int a;
  int b;
  std::optional<BondOrder> order;  // empty when implied
  std::size_t position;
};

struct RingOpen {
  int atom;
  std::optional<BondOrder> order;
  std::size_t position;
};

class SmilesParser {
public:
  explicit SmilesParser(std::string_view text) : text_(text) { }

  Molecule parse() {
    std::size_t end = 0;
    while (end < text_.size()
           && !std::isspace(static_cast<unsigned char>(text_[end]))) {
      ++end;
    }
    std::string_view rest = text_.substr(end);
    while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front()))) {
      rest.remove_prefix(1);
    }
    while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) {
      rest.remove_suffix(1);
    }
    text_ = text_.substr(0, end);
    parse_chain();
    return finish(std::string(rest));
  }

private:
  [[noreturn]] void fail(std::size_t pos, const std::string &reason) const {
    throw SyntaxError(pos, reason);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  bool at_end() const { return pos_ >= text_.size(); }

  std::optional<BondOrder> read_bond() {
    switch (peek()) {
    case '-':
      ++pos_;
      return BondOrder::kSingle;
    case '=':
      ++pos_;
      return BondOrder::kDouble;
    case '#':
      ++pos_;
      return BondOrder::kTriple;
    case ':':
      ++pos_;
      return BondOrder::kAromatic;
    case '$':
      fail(pos_, "quadruple bonds are not supported");
    case '/':
    case '\\':
      fail(pos_, "stereo bond markers are not supported");
    default:
      return std::nullopt;
    }
  }

  void parse_chain() {
    int prev = -1;
    std::optional<BondOrder> bond;
    std::size_t bond_pos = 0;
    bool have_bond = false;
    std::vector<int> branch_stack;

    while (!at_end()) {
      const char c = peek();
      const std::size_t here = pos_;
      if (c == '(') {
        if (prev < 0) {
          fail(here, "branch without a preceding atom");
        }
        if (have_bond) {
          fail(bond_pos, "bond symbol before a branch");
        }
        ++pos_;
        if (peek() == ')') {
          fail(pos_, "empty branch");
        }
        branch_stack.push_back(prev);
        continue;
      }
      if (c == ')') {
        if (branch_stack.empty()) {
          fail(here, "unbalanced ')'");
        }
        if (have_bond) {
          fail(bond_pos, "dangling bond at end of branch");
        }
        ++pos_;
        prev = branch_stack.back();
        branch_stack.pop_back();
        if (peek() == '(' ) {
          continue;
        }
        continue;
      }
      if (c == '.') {
        if (have_bond) {
          fail(bond_pos, "dangling bond before '.'");
        }
        if (!branch_stack.empty()) {
          fail(here, "'.' inside a branch");
        }
        if (prev < 0) {
          fail(here, "'.' without a preceding atom");
        }
        ++pos_;
        prev = -1;
        continue;
      }
      if (auto order = read_bond()) {
        if (have_bond) {
          fail(here, "two consecutive bond symbols");
        }
        if (prev < 0) {
          fail(here, "bond without a preceding atom");
        }
        bond = order;
        bond_pos = here;
        have_bond = true;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0) {
          fail(here, "ring closure without a preceding atom");
        }
        const int label = read_ring_label();
        ring_closure(prev, label, have_bond ? bond : std::nullopt, here);
        have_bond = false;
        bond.reset();
        continue;
      }
      const int atom = read_atom();
      if (prev >= 0) {
        bonds_.push_back({prev, atom, have_bond ? bond : std::nullopt,
                          have_bond ? bond_pos : here});
      } else if (have_bond) {
        fail(bond_pos, "bond without a preceding atom");
      }
      have_bond = false;
      bond.reset();
      prev = atom;
    }
    if (have_bond) {
      fail(bond_pos, "dangling bond at end of input");
    }
    if (!branch_stack.empty()) {
      fail(text_.size(), "unbalanced '('");
    }
    if (!open_rings_.empty()) {
      const auto &[label, open] = *open_rings_.begin();
      fail(open.position,
           "unmatched ring closure " + std::to_string(label));
    }
  }

  int read_ring_label() {
    if (peek() == '%') {
      const std::size_t start = pos_;
      ++pos_;
      if (pos_ + 2 > text_.size()
          || !std::isdigit(static_cast<unsigned char>(text_[pos_]))
          || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
        fail(start, "'%' must be followed by two digits");
      }
      const int label = (text_[pos_] - '0') * 10 + (text_[pos_ + 1] - '0');
      pos_ += 2;
      return label;
    }
    return text_[pos_++] - '0';
  }

  void ring_closure(int atom, int label, std::optional<BondOrder> order,
                    std::size_t here) {
    auto it = open_rings_.find(label);
    if (it == open_rings_.end()) {
      open_rings_.emplace(label, RingOpen {atom, order, here});
      return;
    }
    const RingOpen open = it->second;
    open_rings_.erase(it);
    if (open.atom == atom) {
      fail(here, "ring closure " + std::to_string(label)
                     + " bonds an atom to itself");
    }
    if (open.order && order && *open.order != *order) {
      fail(here, "conflicting bond symbols on ring closure "
                     + std::to_string(label));
    }
    bonds_.push_back({open.atom, atom, order ? order : open.order, here});
  }

  int read_atom() {
    const std::size_t start = pos_;
    const char c = peek();
    if (c == '[') {
      return read_bracket_atom();
    }
    if (c == '*') {
      fail(start, "wildcard atoms are not supported");
    }
    if (c == '@') {
      fail(start, "stereo markers are not supported");
    }
    std::string symbol;
    bool aromatic = false;
    if (std::isupper(static_cast<unsigned char>(c))) {
      symbol = std::string(1, c);
      ++pos_;
      if ((c == 'C' && peek() == 'l') || (c == 'B' && peek() == 'r')) {
        symbol += text_[pos_++];
      }
      if (!organic_subset(symbol)) {
        fail(start, "unknown symbol '" + symbol + "'");
      }
    } else if (std::string_view("bcnosp").find(c) != std::string_view::npos) {
      symbol = std::string(1, static_cast<char>(std::toupper(c)));
      aromatic = true;
      ++pos_;
    } else {
      fail(start, std::string("unexpected character '")
                      + (std::isprint(static_cast<unsigned char>(c))
                             ? std::string(1, c)
                             : std::string("\\x") + hex(c))
                      + "'");
    }
    return add_atom({element(symbol).atomic_number, 0, aromatic,
                     std::nullopt},
                    start);
  }

  static std::string hex(char c) {
    static constexpr char kDigits[] = "0123456789abcdef";
    const auto u = static_cast<unsigned char>(c);
    return {kDigits[u >> 4], kDigits[u & 15]};
  }

  int read_int(int max_digits) {
    int value = 0;
    int digits = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      if (++digits > max_digits) {
        fail(pos_, "number too long in bracket atom");
      }
      value = value * 10 + (text_[pos_++] - '0');
    }
    return value;
  }

  int read_bracket_atom() {
    const std::size_t start = pos_++;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      fail(pos_, "isotopes are not supported");
    }
    if (peek() == '*') {
      fail(pos_, "wildcard atoms are not supported");
    }
    std::string symbol;
    bool aromatic = false;
    const char c = peek();
    if (std::isupper(static_cast<unsigned char>(c))) {
      symbol = std::string(1, c);
      ++pos_;
      if (std::islower(static_cast<unsigned char>(peek()))) {
        std::string two = symbol + peek();
        if (find_element(two) != nullptr) {
          symbol = two;
          ++pos_;
        }
      }
    } else if (std::islower(static_cast<unsigned char>(c))) {
      aromatic = true;
      ++pos_;
      if (c == 's' && peek() == 'e') {
        symbol = "Se";
        ++pos_;
      } else {
        symbol = std::string(1, static_cast<char>(std::toupper(c)));
      }
      if (!aromatic_capable(symbol)) {
        fail(start + 1, "element cannot be aromatic");
      }
    } else {
      fail(pos_, "invalid bracket atom");
    }
    const Element *elem = find_element(symbol);
    if (elem == nullptr) {
      fail(start + 1, "unknown element '" + symbol + "'");
    }
    if (peek() == '@') {
      fail(pos_, "stereo markers are not supported");
    }
    int h = 0;
    if (peek() == 'H') {
      ++pos_;
      h = std::isdigit(static_cast<unsigned char>(peek())) ? read_int(1) : 1;
    }
    int charge = 0;
    if (peek() == '+' || peek() == '-') {
      const char sign_char = text_[pos_++];
      const int sign = sign_char == '+' ? 1 : -1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        charge = sign * read_int(2);
      } else {
        charge = sign;
        while (peek() == sign_char) {
          ++pos_;
          charge += sign;
          if (std::abs(charge) > 15) {
            fail(pos_, "charge out of range");
          }
        }
      }
    }
    if (peek() == ':') {
      fail(pos_, "atom classes are not supported");
    }
    if (peek() != ']') {
      fail(pos_, "invalid bracket atom body");
    }
    ++pos_;
    return add_atom({elem->atomic_number, charge, aromatic, h}, start);
  }

  int add_atom(const AtomSpec &spec, std::size_t position) {
    atoms_.push_back(spec);
    positions_.push_back(position);
    return static_cast<int>(atoms_.size()) - 1;
  }

  Molecule finish(std::string name) {
    const int n = static_cast<int>(atoms_.size());
    std::vector<std::pair<int, int>> edges;
    std::vector<BondOrder> orders;
    std::vector<bool> implied;
    std::map<std::pair<int, int>, std::size_t> seen;
    for (const auto &pending : bonds_) {
      const auto key = std::minmax(pending.a, pending.b);
      if (!seen.emplace(key, pending.position).second) {
        fail(pending.position, "duplicate bond between the same atoms");
      }
      const bool both_aromatic =
          atoms_[pending.a].aromatic && atoms_[pending.b].aromatic;
      BondOrder order;
      if (pending.order) {
        order = *pending.order;
        if (order == BondOrder::kAromatic && !both_aromatic) {
          fail(pending.position,
               "aromatic bond between non-aromatic atoms");
        }
      } else {
        order = both_aromatic ? BondOrder::kAromatic : BondOrder::kSingle;
      }
      edges.emplace_back(pending.a, pending.b);
      orders.push_back(order);
      implied.push_back(!pending.order.has_value());
    }

    // Implied aromatic bonds that are bridges (e.g. biphenyl written without
    // '-') are single bonds.
    const RingInfo rings = perceive_rings(n, edges);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (orders[i] == BondOrder::kAromatic && !rings.bond_in_ring[i]) {
        if (!implied[i]) {
          fail(bonds_[i].position, "aromatic bond outside a ring");
        }
        orders[i] = BondOrder::kSingle;
      }
    }
    for (int i = 0; i < n; ++i) {
      if (atoms_[i].aromatic && !rings.atom_in_ring[i]) {
        fail(positions_[i], "aromatic atom outside a ring");
      }
    }

    MoleculeBuilder builder;
    for (const auto &spec : atoms_) {
      builder.add_atom(spec);
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      builder.add_bond(edges[i].first, edges[i].second, orders[i]);
    }
    if (!name.empty()) {
      builder.set_name(std::move(name));
    }
    return std::move(builder).build();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<AtomSpec> atoms_;
  std::vector<std::size_t> positions_;
  std::vector<PendingBond> bonds_;
  std::map<int, RingOpen> open_rings_;
};

// --- writer ---

class SmilesWriter {
public:
  explicit SmilesWriter(const Molecule &mol)
      : mol_(mol), ranks_(canonical_ranks(mol)) { }

  std::string write() {
    const int n = mol_.atom_count();
    std::vector<int> by_rank(n);
    for (int i = 0; i < n; ++i) {
      by_rank[ranks_[i]] = i;
    }
    state_.assign(n, kUnvisited);
    children_.assign(n, {});
    ring_bonds_.assign(n, {});
    bond_used_.assign(mol_.bond_count(), false);
    ring_digit_.assign(mol_.bond_count(), -1);

    std::string out;
    for (int start : by_rank) {
      if (state_[start] != kUnvisited) {
        continue;
      }
      discover(start, -1);
      if (!out.empty()) {
        out += '.';
      }
      emit(start, -1, out);
    }
    return out;
  }

private:
  enum State { kUnvisited, kOpen, kDone };

  std::vector<Neighbor> ranked_neighbors(int atom) const {
    std::vector<Neighbor> nbs(mol_.neighbors(atom).begin(),
                              mol_.neighbors(atom).end());
    std::sort(nbs.begin(), nbs.end(), [&](const Neighbor &x,
                                          const Neighbor &y) {
      return ranks_[x.atom] < ranks_[y.atom];
    });
    return nbs;
  }

  void discover(int atom, int parent_bond) {
    state_[atom] = kOpen;
    if (parent_bond >= 0) {
      bond_used_[parent_bond] = true;
    }
    for (const auto &nb : ranked_neighbors(atom)) {
      if (bond_used_[nb.bond]) {
        continue;
      }
      if (state_[nb.atom] == kUnvisited) {
        children_[atom].push_back(nb);
        discover(nb.atom, nb.bond);
      } else {
        // Back edge to an ancestor: ring closure at both ends.
        bond_used_[nb.bond] = true;
        ring_bonds_[atom].push_back(nb);
        ring_bonds_[nb.atom].push_back({atom, nb.bond});
      }
    }
    state_[atom] = kDone;
  }

  std::string bond_text(int bond_index) const {
    const Bond &bond = mol_.bond(bond_index);
    const bool both_aromatic =
        mol_.atom(bond.a).aromatic && mol_.atom(bond.b).aromatic;
    switch (bond.order) {
    case BondOrder::kSingle:
      return both_aromatic ? "-" : "";
    case BondOrder::kDouble:
      return "=";
    case BondOrder::kTriple:
      return "#";
    case BondOrder::kAromatic:
      return both_aromatic ? "" : ":";
    }
    return "";
  }

  std::string atom_text(int index) const {
    const Atom &atom = mol_.atom(index);
    const std::string_view symbol = atom.element->symbol;
    if (atom.formal_charge == 0 && organic_subset(symbol)
        && (!atom.aromatic || aromatic_capable(symbol))) {
      int aromatic_bonds = 0;
      int other = 0;
      for (const auto &nb : mol_.neighbors(index)) {
        const BondOrder order = mol_.bond(nb.bond).order;
        if (order == BondOrder::kAromatic) {
          ++aromatic_bonds;
        } else {
          other += static_cast<int>(order);
        }
      }
      try {
        if (default_hydrogen_count(*atom.element, 0, atom.aromatic,
                                   aromatic_bonds, other)
            == atom.implicit_h) {
          std::string out(symbol);
          if (atom.aromatic) {
            out[0] = static_cast<char>(std::tolower(out[0]));
          }
          return out;
        }
      } catch (const ValenceError &) {
        // Needs a bracket.
      }
    }
    std::string out = "[";
    std::string sym(symbol);
    if (atom.aromatic) {
      sym[0] = static_cast<char>(std::tolower(sym[0]));
    }
    out += sym;
    if (atom.implicit_h > 0) {
      out += 'H';
      if (atom.implicit_h > 1) {
        out += std::to_string(atom.implicit_h);
      }
    }
    if (atom.formal_charge != 0) {
      out += atom.formal_charge > 0 ? '+' : '-';
      if (std::abs(atom.formal_charge) > 1) {
        out += std::to_string(std::abs(atom.formal_charge));
      }
    }
    out += ']';
    return out;
  }

  static std::string digit_text(int digit) {
    if (digit < 10) {
      return std::to_string(digit);
    }
    return "%" + std::to_string(digit);
  }

  int take_digit() {
    int d = 1;
    while (std::find(busy_digits_.begin(), busy_digits_.end(), d)
           != busy_digits_.end()) {
      ++d;
    }
    busy_digits_.push_back(d);
    return d;
  }

  void emit(int atom, int parent_bond, std::string &out) {
    if (parent_bond >= 0) {
      out += bond_text(parent_bond);
    }
    out += atom_text(atom);

    // Closings (partner already written) first, then openings; each group
    // in partner rank order.
    auto rings = ring_bonds_[atom];
    std::stable_sort(rings.begin(), rings.end(), [&](const Neighbor &x,
                                                     const Neighbor &y) {
      const bool xc = ring_digit_[x.bond] >= 0;
      const bool yc = ring_digit_[y.bond] >= 0;
      if (xc != yc) {
        return xc;
      }
      return ranks_[x.atom] < ranks_[y.atom];
    });
    for (const auto &nb : rings) {
      if (ring_digit_[nb.bond] >= 0) {
        const int d = ring_digit_[nb.bond];
        out += digit_text(d);
        busy_digits_.erase(
            std::find(busy_digits_.begin(), busy_digits_.end(), d));
      } else {
        const int d = take_digit();
        ring_digit_[nb.bond] = d;
        out += bond_text(nb.bond);
        out += digit_text(d);
      }
    }

    const auto &kids = children_[atom];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const bool branch = i + 1 < kids.size();
      if (branch) {
        out += '(';
      }
      emit(kids[i].atom, kids[i].bond, out);
      if (branch) {
        out += ')';
      }
    }
  }

  const Molecule &mol_;
  std::vector<int> ranks_;
  std::vector<State> state_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<std::vector<Neighbor>> ring_bonds_;
  std::vector<bool> bond_used_;
  std::vector<int> ring_digit_;
  std::vector<int> busy_digits_;
};

}  // namespace

Molecule parse_smiles(std::string_view text) {
  return SmilesParser(text).parse();
}

std::string write_smiles(const Molecule &mol) {
  return SmilesWriter(mol).write();
}

std::string canonical_smiles(std::string_view text) {
  return write_smiles(parse_smiles(text));
}

}  // namespace chemserve
