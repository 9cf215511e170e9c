#include "chemserve/descriptors.h"

namespace chemserve {
namespace {

bool is_n_or_o(const Atom &atom) {
  return atom.atomic_number() == kNitrogen || atom.atomic_number() == kOxygen;
}

}  // namespace

DescriptorSet compute_descriptors(const Molecule &mol) {
  DescriptorSet out;
  const double hydrogen_weight = element(kHydrogen).standard_atomic_weight;
  for (int i = 0; i < mol.atom_count(); ++i) {
    const Atom &atom = mol.atom(i);
    out.molecular_weight += atom.element->standard_atomic_weight
                            + atom.implicit_h * hydrogen_weight;
    if (atom.atomic_number() != kHydrogen) {
      ++out.heavy_atom_count;
    }
    if (is_n_or_o(atom)) {
      ++out.hba;
      bool has_h = atom.implicit_h > 0;
      for (const auto &nb : mol.neighbors(i)) {
        has_h = has_h || mol.atom(nb.atom).atomic_number() == kHydrogen;
      }
      if (has_h) {
        ++out.hbd;
      }
    }
  }
  out.ring_count = mol.cycle_rank();
  for (const auto &bond : mol.bonds()) {
    if (bond.order != BondOrder::kSingle || bond.in_ring) {
      continue;
    }
    const bool heavy_ends = mol.atom(bond.a).atomic_number() != kHydrogen
                            && mol.atom(bond.b).atomic_number() != kHydrogen;
    if (heavy_ends && mol.heavy_degree(bond.a) >= 2
        && mol.heavy_degree(bond.b) >= 2) {
      ++out.rotatable_bonds;
    }
  }
  return out;
}

}  // namespace chemserve
