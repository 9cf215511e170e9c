#include "chemserve/molfile.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <optional>

#include "chemserve/error.h"

namespace chemserve {
namespace {

constexpr std::size_t kMaxV2000Count = 999;

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::string_view field(std::string_view line, std::size_t start,
                       std::size_t width) {
  if (start >= line.size()) {
    return {};
  }
  return line.substr(start, width);
}

std::optional<int> to_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) {
    return std::nullopt;
  }
  if (s.front() == '+') {
    s.remove_prefix(1);
  }
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return value;
}

int int_field(std::string_view line, std::size_t start, std::size_t width,
              std::size_t line_no, const char *what, int fallback) {
  const auto raw = trim(field(line, start, width));
  if (raw.empty()) {
    return fallback;
  }
  const auto value = to_int(raw);
  if (!value) {
    throw FormatError(line_no, std::string("malformed ") + what);
  }
  return *value;
}

bool is_coordinate(std::string_view s) {
  s = trim(s);
  if (s.empty()) {
    return false;
  }
  double value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Atom block charge code (0 = none, 4 = doublet radical).
int charge_from_code(int code) {
  switch (code) {
  case 1:
    return 3;
  case 2:
    return 2;
  case 3:
    return 1;
  case 5:
    return -1;
  case 6:
    return -2;
  case 7:
    return -3;
  default:
    return 0;
  }
}

int code_from_charge(int charge) {
  switch (charge) {
  case 3:
    return 1;
  case 2:
    return 2;
  case 1:
    return 3;
  case -1:
    return 5;
  case -2:
    return 6;
  case -3:
    return 7;
  default:
    return 0;
  }
}

struct BondSums {
  int aromatic = 0;
  int other = 0;

  // Matches the builder's explicit-H validation.
  int valence_sum(bool aromatic_atom) const {
    const int floored = (3 * aromatic) / 2 + other;
    return aromatic_atom ? std::min(floored, aromatic + other) : floored;
  }
};

}  // namespace

Molecule parse_ctab(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.size() < 4) {
    throw FormatError(lines.size() + 1, "missing header or counts line");
  }
  const std::string_view counts = lines[3];
  if (trim(counts).size() < 5
      || trim(counts).substr(trim(counts).size() - 5) != "V2000") {
    throw FormatError(4, "counts line does not end with V2000");
  }
  const auto atom_count = to_int(field(counts, 0, 3));
  const auto bond_count = to_int(field(counts, 3, 3));
  if (!atom_count || !bond_count || *atom_count < 0 || *bond_count < 0) {
    throw FormatError(4, "malformed atom/bond counts");
  }
  const std::size_t n = static_cast<std::size_t>(*atom_count);
  const std::size_t m = static_cast<std::size_t>(*bond_count);
  if (lines.size() < 4 + n + m) {
    throw FormatError(lines.size() + 1, "atom or bond block is short");
  }

  std::vector<AtomSpec> atoms(n);
  std::vector<int> valence_field(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t line_no = 5 + i;
    const std::string_view line = lines[4 + i];
    if (line.size() < 34 || !is_coordinate(field(line, 0, 10))
        || !is_coordinate(field(line, 10, 10))
        || !is_coordinate(field(line, 20, 10))) {
      throw FormatError(line_no, "malformed atom line");
    }
    const std::string symbol(trim(field(line, 31, 3)));
    const Element *elem = find_element(symbol);
    if (elem == nullptr) {
      throw FormatError(line_no, "unsupported element '" + symbol + "'");
    }
    atoms[i].atomic_number = elem->atomic_number;
    atoms[i].formal_charge =
        charge_from_code(int_field(line, 36, 3, line_no, "charge code", 0));
    valence_field[i] = int_field(line, 48, 3, line_no, "valence field", 0);
    if (valence_field[i] < 0 || valence_field[i] > 15) {
      throw FormatError(line_no, "valence field out of range");
    }
  }

  struct RawBond {
    int a;
    int b;
    BondOrder order;
    std::size_t line_no;
  };
  std::vector<RawBond> bonds;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t line_no = 5 + n + i;
    const std::string_view line = lines[4 + n + i];
    const auto a = to_int(field(line, 0, 3));
    const auto b = to_int(field(line, 3, 3));
    const auto type = to_int(field(line, 6, 3));
    if (!a || !b || !type) {
      throw FormatError(line_no, "malformed bond line");
    }
    if (*a < 1 || *b < 1 || *a > static_cast<int>(n)
        || *b > static_cast<int>(n)) {
      throw FormatError(line_no, "bond references a missing atom");
    }
    if (*type < 1 || *type > 4) {
      throw FormatError(line_no, "unknown bond type " + std::to_string(*type));
    }
    const auto order = static_cast<BondOrder>(*type);
    if (order == BondOrder::kAromatic) {
      atoms[*a - 1].aromatic = true;
      atoms[*b - 1].aromatic = true;
    }
    bonds.push_back({*a - 1, *b - 1, order, line_no});
  }

  bool saw_end = false;
  bool saw_chg = false;
  for (std::size_t i = 4 + n + m; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    const std::size_t line_no = i + 1;
    if (line.substr(0, 6) == "M  END") {
      saw_end = true;
      break;
    }
    if (line.substr(0, 6) == "M  CHG") {
      if (!saw_chg) {
        for (auto &atom : atoms) {
          atom.formal_charge = 0;
        }
        saw_chg = true;
      }
      const auto entries = to_int(field(line, 6, 3));
      if (!entries || *entries < 1 || *entries > 8
          || line.size() < 9 + static_cast<std::size_t>(*entries) * 8) {
        throw FormatError(line_no, "malformed M  CHG line");
      }
      for (int k = 0; k < *entries; ++k) {
        const auto atom = to_int(field(line, 9 + k * 8, 4));
        const auto charge = to_int(field(line, 13 + k * 8, 4));
        if (!atom || !charge || *atom < 1 || *atom > static_cast<int>(n)
            || std::abs(*charge) > 15) {
          throw FormatError(line_no, "malformed M  CHG entry");
        }
        atoms[*atom - 1].formal_charge = *charge;
      }
    }
  }
  if (!saw_end) {
    throw FormatError(lines.size(), "missing M  END");
  }

  std::vector<BondSums> sums(n);
  for (const auto &bond : bonds) {
    for (int end : {bond.a, bond.b}) {
      if (bond.order == BondOrder::kAromatic) {
        ++sums[end].aromatic;
      } else {
        sums[end].other += static_cast<int>(bond.order);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (valence_field[i] != 0) {
      const int total = valence_field[i] == 15 ? 0 : valence_field[i];
      const int h = total - sums[i].valence_sum(atoms[i].aromatic);
      if (h < 0) {
        throw FormatError(5 + i, "valence field below bond order sum");
      }
      atoms[i].explicit_h = h;
    }
  }

  MoleculeBuilder builder;
  for (const auto &atom : atoms) {
    builder.add_atom(atom);
  }
  for (const auto &bond : bonds) {
    try {
      builder.add_bond(bond.a, bond.b, bond.order);
    } catch (const InvalidParameter &e) {
      throw FormatError(bond.line_no, e.what());
    }
  }
  const std::string_view title = trim(lines[0]);
  if (!title.empty()) {
    builder.set_name(std::string(title));
  }
  try {
    return std::move(builder).build();
  } catch (const InvalidParameter &e) {
    throw FormatError(0, e.what());
  }
}

std::string write_ctab(const Molecule &mol) {
  if (static_cast<std::size_t>(mol.atom_count()) > kMaxV2000Count
      || static_cast<std::size_t>(mol.bond_count()) > kMaxV2000Count) {
    throw CapacityError("V2000 holds at most 999 atoms and 999 bonds");
  }
  std::string out;
  std::string title = mol.name().value_or("");
  std::replace(title.begin(), title.end(), '\n', ' ');
  std::replace(title.begin(), title.end(), '\r', ' ');
  out += title + "\n";
  out += "  CHEMSRV 00000000002D\n\n";

  char buf[128];
  std::snprintf(buf, sizeof buf, "%3d%3d  0  0  0  0  0  0  0  0999 V2000\n",
                mol.atom_count(), mol.bond_count());
  out += buf;

  for (int i = 0; i < mol.atom_count(); ++i) {
    const Atom &atom = mol.atom(i);
    BondSums sums;
    for (const auto &nb : mol.neighbors(i)) {
      const BondOrder order = mol.bond(nb.bond).order;
      if (order == BondOrder::kAromatic) {
        ++sums.aromatic;
      } else {
        sums.other += static_cast<int>(order);
      }
    }
    int valence = 0;
    bool implied = false;
    try {
      implied = default_hydrogen_count(*atom.element, atom.formal_charge,
                                       atom.aromatic, sums.aromatic,
                                       sums.other)
                == atom.implicit_h;
    } catch (const ValenceError &) {
      implied = false;
    }
    if (!implied) {
      valence = sums.valence_sum(atom.aromatic) + atom.implicit_h;
      if (valence == 0) {
        valence = 15;
      } else if (valence > 14) {
        throw CapacityError("atom valence does not fit the V2000 field");
      }
    }
    std::snprintf(buf, sizeof buf,
                  "%10.4f%10.4f%10.4f %-3s%2d%3d%3d%3d%3d%3d%3d%3d%3d%3d%3d%3d\n",
                  0.0, 0.0, 0.0, std::string(atom.element->symbol).c_str(), 0,
                  code_from_charge(atom.formal_charge), 0, 0, 0, valence, 0,
                  0, 0, 0, 0, 0);
    out += buf;
  }
  for (const auto &bond : mol.bonds()) {
    std::snprintf(buf, sizeof buf, "%3d%3d%3d  0\n", bond.a + 1, bond.b + 1,
                  bond_code(bond.order));
    out += buf;
  }

  std::vector<std::pair<int, int>> charged;
  for (int i = 0; i < mol.atom_count(); ++i) {
    if (mol.atom(i).formal_charge != 0) {
      charged.emplace_back(i + 1, mol.atom(i).formal_charge);
    }
  }
  for (std::size_t start = 0; start < charged.size(); start += 8) {
    const std::size_t count = std::min<std::size_t>(8, charged.size() - start);
    std::snprintf(buf, sizeof buf, "M  CHG%3zu", count);
    out += buf;
    for (std::size_t k = start; k < start + count; ++k) {
      std::snprintf(buf, sizeof buf, " %3d %3d", charged[k].first,
                    charged[k].second);
      out += buf;
    }
    out += '\n';
  }
  out += "M  END\n";
  return out;
}

void PropertyList::set(std::string tag, std::string value) {
  for (auto &[t, v] : items_) {
    if (t == tag) {
      v = std::move(value);
      return;
    }
  }
  items_.emplace_back(std::move(tag), std::move(value));
}

const std::string *PropertyList::find(std::string_view tag) const {
  for (const auto &[t, v] : items_) {
    if (t == tag) {
      return &v;
    }
  }
  return nullptr;
}

std::vector<std::string> split_sdf(std::string_view text) {
  std::vector<std::string> records;
  std::string current;
  for (const auto line : split_lines(text)) {
    if (trim(line) == "$$$$") {
      records.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.append(line);
    current += '\n';
  }
  if (!trim(current).empty()) {
    records.push_back(std::move(current));
  }
  return records;
}

SdfEntry parse_sdf_entry(std::string_view record, std::size_t index) {
  const auto lines = split_lines(record);
  std::size_t end_line = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].substr(0, 6) == "M  END") {
      end_line = i;
      break;
    }
  }
  SdfEntry entry;
  try {
    if (end_line == lines.size()) {
      throw FormatError(lines.size(), "missing M  END");
    }
    // Rebuild the molfile part so line numbers stay record-relative.
    std::string molfile;
    for (std::size_t i = 0; i <= end_line; ++i) {
      molfile.append(lines[i]);
      molfile += '\n';
    }
    entry.molecule = parse_ctab(molfile);

    std::size_t i = end_line + 1;
    while (i < lines.size()) {
      const std::string_view line = lines[i];
      if (trim(line).empty()) {
        ++i;
        continue;
      }
      if (line.front() != '>') {
        throw FormatError(i + 1, "expected a data header line");
      }
      const auto open = line.find('<');
      const auto close = line.find('>', open == std::string_view::npos
                                            ? line.size()
                                            : open + 1);
      if (open == std::string_view::npos || close == std::string_view::npos
          || close == open + 1) {
        throw FormatError(i + 1, "data header without <TAG>");
      }
      std::string tag(line.substr(open + 1, close - open - 1));
      std::string value;
      ++i;
      bool first = true;
      while (i < lines.size() && !lines[i].empty()) {
        if (!first) {
          value += '\n';
        }
        value.append(lines[i]);
        first = false;
        ++i;
      }
      entry.properties.set(std::move(tag), std::move(value));
    }
  } catch (const FormatError &e) {
    throw FormatError(e.line(), e.reason(), index);
  }
  return entry;
}

std::vector<SdfEntry> parse_sdf(std::string_view text) {
  std::vector<SdfEntry> entries;
  const auto records = split_sdf(text);
  entries.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    entries.push_back(parse_sdf_entry(records[i], i));
  }
  return entries;
}

std::string write_sdf(const std::vector<SdfEntry> &entries) {
  std::string out;
  for (const auto &entry : entries) {
    out += write_ctab(entry.molecule);
    for (const auto &[tag, value] : entry.properties.items()) {
      if (tag.empty() || tag.find_first_of(">\r\n") != std::string::npos) {
        throw InvalidParameter("invalid SD tag '" + tag + "'");
      }
      if (!value.empty()
          && (value.find("\n\n") != std::string::npos
              || value.front() == '\n' || value.back() == '\n')) {
        throw InvalidParameter("SD value for '" + tag
                               + "' contains a blank line");
      }
      out += "> <" + tag + ">\n" + value + "\n\n";
    }
    out += "$$$$\n";
  }
  return out;
}

}  // namespace chemserve
