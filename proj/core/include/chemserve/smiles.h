#pragma once

#include <string>
#include <string_view>

#include "chemserve/molecule.h"

namespace chemserve {

// Parses a SMILES string. Supported: organic-subset and aromatic atoms,
// bracket atoms with H count and charge, bonds - = # :, branches, ring
// closures (digits and %nn) and dot-separated components. Text after the
// first whitespace is taken as the molecule name. Stereo markers, isotopes,
// atom classes and wildcards are rejected.
// Throws SyntaxError, ValenceError or UnsupportedElement.
Molecule parse_smiles(std::string_view text);

// Canonical SMILES: a pure function of the graph (element, charge,
// aromaticity, hydrogen count, bonds), independent of atom order.
std::string write_smiles(const Molecule &mol);

// write_smiles(parse_smiles(text)).
std::string canonical_smiles(std::string_view text);

}  // namespace chemserve
