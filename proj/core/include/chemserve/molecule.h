#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chemserve/element.h"

namespace chemserve {

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

// Numeric code used in hashes and molfile bond blocks.
constexpr int bond_code(BondOrder order) { return static_cast<int>(order); }

struct Atom {
  const Element *element = nullptr;
  int formal_charge = 0;
  bool aromatic = false;
  // Set only when the input notation fixed the hydrogen count.
  std::optional<int> explicit_h;
  // Total attached (non-graph) hydrogens; equals explicit_h when set.
  int implicit_h = 0;
  bool in_ring = false;

  int atomic_number() const { return element->atomic_number; }
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::kSingle;
  bool in_ring = false;

  int other(int atom) const { return atom == a ? b : a; }
};

struct Neighbor {
  int atom;
  int bond;
};

struct RingInfo {
  int cycle_rank = 0;
  int components = 0;
  std::vector<bool> atom_in_ring;
  std::vector<bool> bond_in_ring;
};

// Ring membership from the bridge structure of the graph: a bond is in a
// ring iff it is not a bridge. Works for any graph given as an edge list.
RingInfo perceive_rings(int atom_count,
                        std::span<const std::pair<int, int>> edges);

// Hydrogen count a bare (unbracketed) atom receives from its bonds. Aromatic
// bonds count 1.5 each and the sum is floored once. Aromatic heteroatoms whose
// floored sum exceeds their lowest valence are treated as lone-pair donors
// (each aromatic bond counts 1), which gives furan/thiophene 0 H.
// Throws ValenceError when no valence accommodates the bonds.
int default_hydrogen_count(const Element &element, int formal_charge,
                           bool aromatic, int aromatic_bonds,
                           int other_order_sum);

// Valences after the charge adjustment rules (see element table).
std::vector<int> adjusted_valences(const Element &element, int formal_charge);

class MoleculeBuilder;

// Finalized, immutable molecular graph.
class Molecule {
public:
  Molecule() = default;

  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const Bond> bonds() const { return bonds_; }
  const Atom &atom(int i) const { return atoms_[i]; }
  const Bond &bond(int i) const { return bonds_[i]; }
  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }
  bool empty() const { return atoms_.empty(); }

  std::span<const Neighbor> neighbors(int atom) const {
    return adjacency_[atom];
  }
  int degree(int atom) const {
    return static_cast<int>(adjacency_[atom].size());
  }
  // Number of non-hydrogen graph neighbors.
  int heavy_degree(int atom) const;
  // Bond index joining a and b, or -1.
  int bond_between(int a, int b) const;

  int cycle_rank() const { return cycle_rank_; }
  int component_count() const { return components_; }
  int heavy_atom_count() const;

  const std::optional<std::string> &name() const { return name_; }

private:
  friend class MoleculeBuilder;

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  int cycle_rank_ = 0;
  int components_ = 0;
  std::optional<std::string> name_;
};

struct AtomSpec {
  int atomic_number = kCarbon;
  int formal_charge = 0;
  bool aromatic = false;
  std::optional<int> explicit_h;
};

// Single-use assembly of a Molecule. build() perceives rings, assigns
// implicit hydrogens and validates the graph invariants.
class MoleculeBuilder {
public:
  // Throws UnsupportedElement.
  int add_atom(const AtomSpec &spec);
  // Throws InvalidParameter for self loops, duplicate pairs or bad indices.
  int add_bond(int a, int b, BondOrder order);
  void set_name(std::string name) { name_ = std::move(name); }

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }

  // Throws ValenceError, or InvalidParameter when an aromatic atom or bond
  // is not on a ring.
  Molecule build() &&;

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::optional<std::string> name_;
};

// Copy of `mol` with atom i moved to position new_index[i]. Bond order in the
// result follows the relabeled pairs sorted ascending.
Molecule relabel(const Molecule &mol, std::span<const int> new_index);

}  // namespace chemserve
