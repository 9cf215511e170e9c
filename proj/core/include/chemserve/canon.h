#pragma once

#include <vector>

#include "chemserve/molecule.h"

namespace chemserve {

// Canonical rank of every atom (a bijection onto 0..n-1), invariant under
// any relabeling of the input. Classes start from (atomic number, degree,
// hydrogen count, charge, ring flag, aromatic flag), are refined by sorted
// neighbor (rank, bond order) multisets, and remaining ties are broken on
// the lowest-index member of the lowest tied class before refining again.
std::vector<int> canonical_ranks(const Molecule &mol);

}  // namespace chemserve
