#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "chemserve/molecule.h"
#include "chemserve/substructure.h"

namespace chemserve {

struct McsResult {
  std::string smiles;  // empty when nothing is shared
  int atom_count = 0;
  int bond_count = 0;
  // One mapping (fragment atom -> input atom) per input molecule.
  std::vector<AtomMapping> mappings;
  bool completed = true;
};

struct McsOptions {
  // Fragments never grow beyond this many atoms; 0 means unbounded.
  int atom_budget = 0;
  // Search nodes shared by all pairwise searches.
  std::size_t node_limit = 5'000'000;
};

// Largest connected common substructure (atoms first, then bonds), found by
// maximum-clique search on the modular product of each pair and folded left
// over the inputs. Atom pairs must agree on element and aromaticity; paired
// bonds must have equal order and unpaired atom pairs must be non-bonded in
// both molecules, so the fragment is an induced subgraph of every input.
// Aromatic atoms and bonds of the fragment must lie on a fragment ring so the
// fragment is itself a valid Molecule. When the node limit runs out the best
// fragment found so far is returned with completed = false.
// Throws InvalidParameter for fewer than two molecules.
McsResult max_common_substructure(std::span<const Molecule> mols,
                                  const McsOptions &options = {});

// Fragment validity used by the search: every aromatic atom and aromatic bond
// of the induced subgraph on `atoms` lies on a cycle of that subgraph.
bool aromatic_rings_complete(const Molecule &mol, std::span<const int> atoms);

}  // namespace chemserve
