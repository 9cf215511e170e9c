#include "chemserve/mcs.h"

#include <algorithm>
#include <bit>
#include <cstdint>

#include "chemserve/error.h"
#include "chemserve/smiles.h"

namespace chemserve {

bool aromatic_rings_complete(const Molecule &mol, std::span<const int> atoms) {
  std::vector<int> local(mol.atom_count(), -1);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    local[atoms[k]] = static_cast<int>(k);
  }
  std::vector<std::pair<int, int>> edges;
  std::vector<bool> aromatic_edge;
  for (const auto &bond : mol.bonds()) {
    if (local[bond.a] >= 0 && local[bond.b] >= 0) {
      edges.emplace_back(local[bond.a], local[bond.b]);
      aromatic_edge.push_back(bond.order == BondOrder::kAromatic);
    }
  }
  const RingInfo rings =
      perceive_rings(static_cast<int>(atoms.size()), edges);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (aromatic_edge[e] && !rings.bond_in_ring[e]) {
      return false;
    }
  }
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (mol.atom(atoms[k]).aromatic && !rings.atom_in_ring[k]) {
      return false;
    }
  }
  return true;
}

namespace {

class Bitset {
public:
  explicit Bitset(std::size_t n = 0) : words_((n + 63) / 64, 0) { }

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t {1} << (i & 63); }
  void reset(std::size_t i) {
    words_[i >> 6] &= ~(std::uint64_t {1} << (i & 63));
  }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  bool none() const {
    return std::all_of(words_.begin(), words_.end(),
                       [](std::uint64_t w) { return w == 0; });
  }
  int count() const {
    int c = 0;
    for (auto w : words_) {
      c += std::popcount(w);
    }
    return c;
  }
  Bitset operator&(const Bitset &o) const {
    Bitset r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      r.words_[i] &= o.words_[i];
    }
    return r;
  }
  Bitset &operator|=(const Bitset &o) {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      words_[i] |= o.words_[i];
    }
    return *this;
  }
  template <class F>
  void for_each(F &&f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int b = std::countr_zero(bits);
        f(w * 64 + b);
        bits &= bits - 1;
      }
    }
  }
  // Lowest set index, or npos.
  std::size_t first() const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if (words_[w] != 0) {
        return w * 64 + std::countr_zero(words_[w]);
      }
    }
    return static_cast<std::size_t>(-1);
  }

private:
  std::vector<std::uint64_t> words_;
};

struct Pairwise {
  std::vector<int> atoms_a;  // fragment atoms in `a`, ascending
  std::vector<int> atoms_b;  // paired atoms in `b`
  int bonds = 0;
};

// Connected maximum common induced subgraph of two molecules.
class CliqueSearch {
public:
  CliqueSearch(const Molecule &a, const Molecule &b, int atom_budget,
               std::size_t &nodes_left)
      : a_(a), b_(b), atom_budget_(atom_budget), nodes_left_(nodes_left) {
    for (int i = 0; i < a.atom_count(); ++i) {
      for (int j = 0; j < b.atom_count(); ++j) {
        const Atom &x = a.atom(i);
        const Atom &y = b.atom(j);
        if (x.atomic_number() == y.atomic_number()
            && x.aromatic == y.aromatic) {
          pairs_.emplace_back(i, j);
        }
      }
    }
    const std::size_t v = pairs_.size();
    compat_.assign(v, Bitset(v));
    bonded_.assign(v, Bitset(v));
    for (std::size_t p = 0; p < v; ++p) {
      for (std::size_t q = p + 1; q < v; ++q) {
        const auto [i, j] = pairs_[p];
        const auto [k, l] = pairs_[q];
        if (i == k || j == l) {
          continue;
        }
        const int ba = a.bond_between(i, k);
        const int bb = b.bond_between(j, l);
        if (ba < 0 && bb < 0) {
          compat_[p].set(q);
          compat_[q].set(p);
        } else if (ba >= 0 && bb >= 0
                   && bonds_compatible(a.bond(ba).order, b.bond(bb).order)) {
          compat_[p].set(q);
          compat_[q].set(p);
          bonded_[p].set(q);
          bonded_[q].set(p);
        }
      }
    }
  }

  Pairwise run() {
    const std::size_t v = pairs_.size();
    Bitset candidates(v);
    for (std::size_t p = 0; p < v; ++p) {
      candidates.set(p);
    }
    Bitset reach(v);
    expand(candidates, reach, 0);

    Pairwise out;
    std::vector<std::pair<int, int>> chosen;
    for (auto p : best_) {
      chosen.push_back(pairs_[p]);
    }
    std::sort(chosen.begin(), chosen.end());
    for (const auto &[i, j] : chosen) {
      out.atoms_a.push_back(i);
      out.atoms_b.push_back(j);
    }
    out.bonds = best_bonds_;
    return out;
  }

  bool exhausted() const { return exhausted_; }

private:
  // Distinct atoms of `a` among candidates: a clique uses each at most once.
  int bound(const Bitset &candidates) const {
    std::vector<bool> seen(a_.atom_count(), false);
    int distinct_a = 0;
    std::vector<bool> seen_b(b_.atom_count(), false);
    int distinct_b = 0;
    candidates.for_each([&](std::size_t p) {
      if (!seen[pairs_[p].first]) {
        seen[pairs_[p].first] = true;
        ++distinct_a;
      }
      if (!seen_b[pairs_[p].second]) {
        seen_b[pairs_[p].second] = true;
        ++distinct_b;
      }
    });
    return static_cast<int>(clique_.size()) + std::min(distinct_a, distinct_b);
  }

  void consider(int bonds) {
    const int size = static_cast<int>(clique_.size());
    if (size < best_atoms_ || (size == best_atoms_ && bonds <= best_bonds_)) {
      return;
    }
    std::vector<int> atoms;
    for (auto p : clique_) {
      atoms.push_back(pairs_[p].first);
    }
    std::sort(atoms.begin(), atoms.end());
    if (!aromatic_rings_complete(a_, atoms)) {
      return;
    }
    best_ = clique_;
    best_atoms_ = size;
    best_bonds_ = bonds;
  }

  // `candidates`: vertices compatible with the whole clique. `reach`:
  // vertices bonded to some clique member (growth keeps the clique connected).
  void expand(Bitset candidates, const Bitset &reach, int bonds) {
    if (exhausted_) {
      return;
    }
    if (nodes_left_ == 0) {
      exhausted_ = true;
      return;
    }
    --nodes_left_;
    if (!clique_.empty()) {
      consider(bonds);
    }
    if (atom_budget_ > 0 && static_cast<int>(clique_.size()) >= atom_budget_) {
      return;
    }
    while (true) {
      Bitset growable = clique_.empty() ? candidates : candidates & reach;
      if (growable.none()) {
        return;
      }
      if (bound(candidates) < best_atoms_) {
        return;
      }
      const std::size_t v = growable.first();
      candidates.reset(v);

      int added = 0;
      for (auto p : clique_) {
        if (bonded_[v].test(p)) {
          ++added;
        }
      }
      Bitset next_reach = reach;
      next_reach |= bonded_[v];
      clique_.push_back(v);
      expand(candidates & compat_[v], next_reach, bonds + added);
      clique_.pop_back();
      if (exhausted_) {
        return;
      }
    }
  }

  const Molecule &a_;
  const Molecule &b_;
  int atom_budget_;
  std::size_t &nodes_left_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<Bitset> compat_;
  std::vector<Bitset> bonded_;
  std::vector<std::size_t> clique_;
  std::vector<std::size_t> best_;
  int best_atoms_ = 0;
  int best_bonds_ = -1;
  bool exhausted_ = false;
};

Molecule build_fragment(const Molecule &a, const Molecule &b,
                        const Pairwise &common) {
  MoleculeBuilder builder;
  std::vector<int> local(a.atom_count(), -1);
  for (std::size_t k = 0; k < common.atoms_a.size(); ++k) {
    const Atom &x = a.atom(common.atoms_a[k]);
    const Atom &y = b.atom(common.atoms_b[k]);
    local[common.atoms_a[k]] = static_cast<int>(k);
    builder.add_atom({x.atomic_number(),
                      x.formal_charge == y.formal_charge ? x.formal_charge : 0,
                      x.aromatic, std::nullopt});
  }
  std::vector<int> aromatic_bonds(common.atoms_a.size(), 0);
  std::vector<int> other(common.atoms_a.size(), 0);
  for (const auto &bond : a.bonds()) {
    const int x = local[bond.a];
    const int y = local[bond.b];
    if (x >= 0 && y >= 0) {
      builder.add_bond(x, y, bond.order);
      for (int end : {x, y}) {
        if (bond.order == BondOrder::kAromatic) {
          ++aromatic_bonds[end];
        } else {
          other[end] += static_cast<int>(bond.order);
        }
      }
    }
  }
  // Rebuild with fixed zero hydrogens where a bare atom would be overvalent
  // (possible once a mismatched charge is dropped).
  bool overvalent = false;
  std::vector<bool> fix(common.atoms_a.size(), false);
  for (std::size_t k = 0; k < common.atoms_a.size(); ++k) {
    const Atom &x = a.atom(common.atoms_a[k]);
    const Atom &y = b.atom(common.atoms_b[k]);
    const int charge = x.formal_charge == y.formal_charge ? x.formal_charge : 0;
    try {
      default_hydrogen_count(*x.element, charge, x.aromatic, aromatic_bonds[k],
                             other[k]);
    } catch (const ValenceError &) {
      fix[k] = true;
      overvalent = true;
    }
  }
  if (!overvalent) {
    return std::move(builder).build();
  }
  MoleculeBuilder fixed;
  for (std::size_t k = 0; k < common.atoms_a.size(); ++k) {
    const Atom &x = a.atom(common.atoms_a[k]);
    const Atom &y = b.atom(common.atoms_b[k]);
    fixed.add_atom({x.atomic_number(),
                    x.formal_charge == y.formal_charge ? x.formal_charge : 0,
                    x.aromatic,
                    fix[k] ? std::optional<int>(0) : std::nullopt});
  }
  for (const auto &bond : a.bonds()) {
    if (local[bond.a] >= 0 && local[bond.b] >= 0) {
      fixed.add_bond(local[bond.a], local[bond.b], bond.order);
    }
  }
  return std::move(fixed).build();
}

}  // namespace

McsResult max_common_substructure(std::span<const Molecule> mols,
                                  const McsOptions &options) {
  if (mols.size() < 2) {
    throw InvalidParameter("MCS needs at least two molecules");
  }
  if (options.atom_budget < 0) {
    throw InvalidParameter("atom budget must be non-negative");
  }
  McsResult result;
  std::size_t nodes_left = options.node_limit;
  Molecule fragment = mols[0];
  for (std::size_t m = 1; m < mols.size() && !fragment.empty(); ++m) {
    CliqueSearch search(fragment, mols[m], options.atom_budget, nodes_left);
    const Pairwise common = search.run();
    if (search.exhausted()) {
      result.completed = false;
    }
    fragment = build_fragment(fragment, mols[m], common);
  }
  if (fragment.empty()) {
    result.mappings.assign(mols.size(), AtomMapping {});
    return result;
  }
  result.smiles = write_smiles(fragment);
  result.atom_count = fragment.atom_count();
  result.bond_count = fragment.bond_count();
  for (const auto &mol : mols) {
    auto found = match_substructure(fragment, mol, 1);
    result.mappings.push_back(found.empty() ? AtomMapping {}
                                            : std::move(found.front()));
  }
  return result;
}

}  // namespace chemserve
