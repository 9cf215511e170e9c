#pragma once

#include <cstddef>
#include <vector>

#include "chemserve/molecule.h"

namespace chemserve {

// mapping[q] is the target atom matched to query atom q.
using AtomMapping = std::vector<int>;

// Element and aromaticity must agree; an uncharged query atom matches any
// target charge, a charged one only the same charge.
bool atoms_compatible(const Atom &query, const Atom &target);

// Equal order (aromatic pairs with aromatic).
inline bool bonds_compatible(BondOrder query, BondOrder target) {
  return query == target;
}

// Backtracking subgraph-monomorphism search. Query atoms are visited in a
// connectivity-first order, candidates come from the image of an already
// matched neighbor, and target atoms with lower degree are pruned. Returns
// up to `max_matches` distinct mappings; empty means no match.
// Throws InvalidParameter for an empty query.
std::vector<AtomMapping> match_substructure(const Molecule &query,
                                            const Molecule &target,
                                            std::size_t max_matches);

inline bool has_substructure(const Molecule &query, const Molecule &target) {
  return !match_substructure(query, target, 1).empty();
}

}  // namespace chemserve
