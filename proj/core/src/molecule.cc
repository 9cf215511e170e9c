#include "chemserve/molecule.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "chemserve/error.h"

namespace chemserve {

RingInfo perceive_rings(int atom_count,
                        std::span<const std::pair<int, int>> edges) {
  RingInfo info;
  info.atom_in_ring.assign(atom_count, false);
  info.bond_in_ring.assign(edges.size(), false);

  std::vector<std::vector<Neighbor>> adj(atom_count);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    adj[edges[e].first].push_back({edges[e].second, e});
    adj[edges[e].second].push_back({edges[e].first, e});
  }

  // Iterative Tarjan bridge finding; a non-bridge edge lies on a cycle.
  std::vector<int> disc(atom_count, -1), low(atom_count, 0);
  std::vector<bool> is_bridge(edges.size(), false);
  struct Frame {
    int atom;
    int parent_edge;
    std::size_t next;
  };
  std::vector<Frame> stack;
  int timer = 0;
  for (int root = 0; root < atom_count; ++root) {
    if (disc[root] >= 0) {
      continue;
    }
    ++info.components;
    disc[root] = low[root] = timer++;
    stack.push_back({root, -1, 0});
    while (!stack.empty()) {
      Frame &f = stack.back();
      if (f.next < adj[f.atom].size()) {
        const Neighbor nb = adj[f.atom][f.next++];
        if (nb.bond == f.parent_edge) {
          continue;
        }
        if (disc[nb.atom] < 0) {
          disc[nb.atom] = low[nb.atom] = timer++;
          stack.push_back({nb.atom, nb.bond, 0});
        } else {
          low[f.atom] = std::min(low[f.atom], disc[nb.atom]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          Frame &parent = stack.back();
          low[parent.atom] = std::min(low[parent.atom], low[done.atom]);
          if (low[done.atom] > disc[parent.atom]) {
            is_bridge[done.parent_edge] = true;
          }
        }
      }
    }
  }

  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    if (!is_bridge[e]) {
      info.bond_in_ring[e] = true;
      info.atom_in_ring[edges[e].first] = true;
      info.atom_in_ring[edges[e].second] = true;
    }
  }
  info.cycle_rank =
      static_cast<int>(edges.size()) - atom_count + info.components;
  return info;
}

std::vector<int> adjusted_valences(const Element &element, int formal_charge) {
  std::vector<int> out;
  const int magnitude = std::abs(formal_charge);
  for (int v : element.default_valences) {
    int adjusted = v;
    if (formal_charge > 0) {
      // Onium-type cations (N+, O+, S+, I+) gain a bond; others lose one.
      adjusted = element.group >= 15 ? v + magnitude : v - magnitude;
    } else if (formal_charge < 0) {
      // Group 13 anions are isoelectronic with group 14 (BH4-).
      adjusted = element.group == 13 ? v + magnitude : v - magnitude;
    }
    if (adjusted >= 0) {
      out.push_back(adjusted);
    }
  }
  if (out.empty()) {
    out.push_back(0);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Bond sum under the 1.5-per-aromatic-bond rule, floored once.
int floored_sum(int aromatic_bonds, int other_order_sum) {
  return (3 * aromatic_bonds) / 2 + other_order_sum;
}

std::string valence_message(const Element &element, int sum) {
  return std::string(element.symbol) + " with bond order sum "
         + std::to_string(sum) + " exceeds every supported valence";
}

}  // namespace

int default_hydrogen_count(const Element &element, int formal_charge,
                           bool aromatic, int aromatic_bonds,
                           int other_order_sum) {
  const auto valences = adjusted_valences(element, formal_charge);
  const int sum = floored_sum(aromatic_bonds, other_order_sum);
  if (aromatic && aromatic_bonds > 0 && sum > valences.front()) {
    const int donor = aromatic_bonds + other_order_sum;
    if (donor <= valences.front()) {
      return valences.front() - donor;
    }
  }
  for (int v : valences) {
    if (v >= sum) {
      return v - sum;
    }
  }
  throw ValenceError(valence_message(element, sum));
}

int Molecule::heavy_degree(int atom) const {
  int n = 0;
  for (const auto &nb : adjacency_[atom]) {
    if (atoms_[nb.atom].atomic_number() != kHydrogen) {
      ++n;
    }
  }
  return n;
}

int Molecule::bond_between(int a, int b) const {
  for (const auto &nb : adjacency_[a]) {
    if (nb.atom == b) {
      return nb.bond;
    }
  }
  return -1;
}

int Molecule::heavy_atom_count() const {
  return static_cast<int>(
      std::count_if(atoms_.begin(), atoms_.end(), [](const Atom &a) {
        return a.atomic_number() != kHydrogen;
      }));
}

int MoleculeBuilder::add_atom(const AtomSpec &spec) {
  Atom atom;
  atom.element = &element(spec.atomic_number);
  atom.formal_charge = spec.formal_charge;
  atom.aromatic = spec.aromatic;
  if (spec.explicit_h && *spec.explicit_h < 0) {
    throw InvalidParameter("negative hydrogen count");
  }
  atom.explicit_h = spec.explicit_h;
  atoms_.push_back(atom);
  return static_cast<int>(atoms_.size()) - 1;
}

int MoleculeBuilder::add_bond(int a, int b, BondOrder order) {
  const int n = atom_count();
  if (a < 0 || b < 0 || a >= n || b >= n) {
    throw InvalidParameter("bond references a missing atom");
  }
  if (a == b) {
    throw InvalidParameter("bond joins an atom to itself");
  }
  for (const auto &bond : bonds_) {
    if ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a)) {
      throw InvalidParameter("duplicate bond between atoms "
                             + std::to_string(a) + " and "
                             + std::to_string(b));
    }
  }
  bonds_.push_back({a, b, order, false});
  return static_cast<int>(bonds_.size()) - 1;
}

Molecule MoleculeBuilder::build() && {
  Molecule mol;
  mol.atoms_ = std::move(atoms_);
  mol.bonds_ = std::move(bonds_);
  mol.name_ = std::move(name_);
  const int n = static_cast<int>(mol.atoms_.size());

  mol.adjacency_.assign(n, {});
  std::vector<std::pair<int, int>> edges;
  edges.reserve(mol.bonds_.size());
  for (int i = 0; i < static_cast<int>(mol.bonds_.size()); ++i) {
    const auto &bond = mol.bonds_[i];
    mol.adjacency_[bond.a].push_back({bond.b, i});
    mol.adjacency_[bond.b].push_back({bond.a, i});
    edges.emplace_back(bond.a, bond.b);
  }

  const RingInfo rings = perceive_rings(n, edges);
  mol.cycle_rank_ = rings.cycle_rank;
  mol.components_ = rings.components;
  for (int i = 0; i < n; ++i) {
    mol.atoms_[i].in_ring = rings.atom_in_ring[i];
  }
  for (int i = 0; i < static_cast<int>(mol.bonds_.size()); ++i) {
    auto &bond = mol.bonds_[i];
    bond.in_ring = rings.bond_in_ring[i];
    if (bond.order == BondOrder::kAromatic && !bond.in_ring) {
      throw InvalidParameter("aromatic bond outside a ring");
    }
  }

  for (int i = 0; i < n; ++i) {
    Atom &atom = mol.atoms_[i];
    if (atom.aromatic && !atom.in_ring) {
      throw InvalidParameter("aromatic atom outside a ring");
    }
    int aromatic_bonds = 0;
    int other_sum = 0;
    for (const auto &nb : mol.adjacency_[i]) {
      const BondOrder order = mol.bonds_[nb.bond].order;
      if (order == BondOrder::kAromatic) {
        ++aromatic_bonds;
      } else {
        other_sum += static_cast<int>(order);
      }
    }
    if (atom.explicit_h) {
      const auto valences =
          adjusted_valences(*atom.element, atom.formal_charge);
      int sum = floored_sum(aromatic_bonds, other_sum);
      if (atom.aromatic) {
        sum = std::min(sum, aromatic_bonds + other_sum);
      }
      if (sum + *atom.explicit_h > valences.back()) {
        throw ValenceError(
            valence_message(*atom.element, sum + *atom.explicit_h));
      }
      atom.implicit_h = *atom.explicit_h;
    } else {
      atom.implicit_h = default_hydrogen_count(
          *atom.element, atom.formal_charge, atom.aromatic, aromatic_bonds,
          other_sum);
    }
  }
  return mol;
}

Molecule relabel(const Molecule &mol, std::span<const int> new_index) {
  const int n = mol.atom_count();
  if (static_cast<int>(new_index.size()) != n) {
    throw InvalidParameter("relabel permutation has the wrong size");
  }
  std::vector<int> old_at(n, -1);
  for (int i = 0; i < n; ++i) {
    if (new_index[i] < 0 || new_index[i] >= n || old_at[new_index[i]] >= 0) {
      throw InvalidParameter("relabel map is not a permutation");
    }
    old_at[new_index[i]] = i;
  }
  MoleculeBuilder builder;
  for (int pos = 0; pos < n; ++pos) {
    const Atom &atom = mol.atom(old_at[pos]);
    builder.add_atom({atom.atomic_number(), atom.formal_charge, atom.aromatic,
                      atom.explicit_h});
  }
  std::vector<Bond> bonds(mol.bonds().begin(), mol.bonds().end());
  for (auto &bond : bonds) {
    bond.a = new_index[bond.a];
    bond.b = new_index[bond.b];
    if (bond.a > bond.b) {
      std::swap(bond.a, bond.b);
    }
  }
  std::sort(bonds.begin(), bonds.end(), [](const Bond &x, const Bond &y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  for (const auto &bond : bonds) {
    builder.add_bond(bond.a, bond.b, bond.order);
  }
  if (mol.name()) {
    builder.set_name(*mol.name());
  }
  return std::move(builder).build();
}

}  // namespace chemserve
