#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chemserve/molecule.h"

namespace chemserve {

// Reads a V2000 connection table. Coordinates are validated and discarded,
// charges come from "M  CHG" (or the atom block charge code when no CHG line
// is present), bond type 4 is aromatic and the atom-block valence field, when
// set, fixes the hydrogen count.
// Throws FormatError (1-based line numbers), ValenceError.
Molecule parse_ctab(std::string_view text);

// Writes a V2000 connection table with zeroed coordinates. Atoms whose
// hydrogen count is not implied by their bonds carry the valence field.
// Throws CapacityError above 999 atoms or bonds.
std::string write_ctab(const Molecule &mol);

// Ordered, tag-unique property list of an SD record.
class PropertyList {
public:
  using Item = std::pair<std::string, std::string>;

  // Replaces the value of an existing tag in place.
  void set(std::string tag, std::string value);
  const std::string *find(std::string_view tag) const;
  const std::vector<Item> &items() const { return items_; }
  bool empty() const { return items_.empty(); }

  friend bool operator==(const PropertyList &, const PropertyList &) = default;

private:
  std::vector<Item> items_;
};

struct SdfEntry {
  Molecule molecule;
  PropertyList properties;
};

// Splits SD text into per-record texts (without the "$$$$" delimiter). A
// trailing record without delimiter is kept; whitespace-only tails are not.
std::vector<std::string> split_sdf(std::string_view text);

// Parses one record (molfile plus data items). `index` is attached to any
// FormatError.
SdfEntry parse_sdf_entry(std::string_view record, std::size_t index);

std::vector<SdfEntry> parse_sdf(std::string_view text);

// Throws CapacityError, or InvalidParameter for tags containing '>' or a
// newline and for values containing blank lines.
std::string write_sdf(const std::vector<SdfEntry> &entries);

}  // namespace chemserve
