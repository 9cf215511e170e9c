#pragma once

#include "chemserve/molecule.h"

namespace chemserve {

struct DescriptorSet {
  double molecular_weight = 0.0;
  int heavy_atom_count = 0;
  int ring_count = 0;  // cycle rank
  int rotatable_bonds = 0;
  int hbd = 0;
  int hba = 0;

  friend bool operator==(const DescriptorSet &, const DescriptorSet &) =
      default;
};

// Rotatable bonds are acyclic single bonds whose ends both have at least two
// heavy neighbors; no amide special case. Donors are N/O carrying hydrogen,
// acceptors are all N/O.
DescriptorSet compute_descriptors(const Molecule &mol);

}  // namespace chemserve
