#include "chemserve/substructure.h"

#include <algorithm>

#include "chemserve/error.h"

namespace chemserve {

bool atoms_compatible(const Atom &query, const Atom &target) {
  return query.atomic_number() == target.atomic_number()
         && query.aromatic == target.aromatic
         && (query.formal_charge == 0
             || query.formal_charge == target.formal_charge);
}

namespace {

class Matcher {
public:
  Matcher(const Molecule &query, const Molecule &target, std::size_t limit)
      : query_(query), target_(target), limit_(limit),
        image_(query.atom_count(), -1), used_(target.atom_count(), false) {
    plan();
  }

  std::vector<AtomMapping> run() {
    search(0);
    return std::move(found_);
  }

private:
  struct Step {
    int atom;
    int anchor;  // earlier-matched neighbor, or -1
  };

  // Connectivity-first order: seed each component at its highest-degree
  // atom, then repeatedly take the unplaced atom with most placed neighbors.
  void plan() {
    const int n = query_.atom_count();
    std::vector<bool> placed(n, false);
    std::vector<int> placed_neighbors(n, 0);
    for (int count = 0; count < n; ++count) {
      int best = -1;
      for (int i = 0; i < n; ++i) {
        if (placed[i]) {
          continue;
        }
        if (best < 0 || placed_neighbors[i] > placed_neighbors[best]
            || (placed_neighbors[i] == placed_neighbors[best]
                && query_.degree(i) > query_.degree(best))) {
          best = i;
        }
      }
      int anchor = -1;
      for (const auto &nb : query_.neighbors(best)) {
        if (placed[nb.atom]) {
          anchor = nb.atom;
          break;
        }
      }
      order_.push_back({best, anchor});
      placed[best] = true;
      for (const auto &nb : query_.neighbors(best)) {
        ++placed_neighbors[nb.atom];
      }
    }
  }

  bool feasible(int q, int t) const {
    if (used_[t] || !atoms_compatible(query_.atom(q), target_.atom(t))
        || target_.degree(t) < query_.degree(q)) {
      return false;
    }
    for (const auto &nb : query_.neighbors(q)) {
      const int mapped = image_[nb.atom];
      if (mapped < 0) {
        continue;
      }
      const int bond = target_.bond_between(t, mapped);
      if (bond < 0
          || !bonds_compatible(query_.bond(nb.bond).order,
                               target_.bond(bond).order)) {
        return false;
      }
    }
    return true;
  }

  void search(std::size_t depth) {
    if (found_.size() >= limit_) {
      return;
    }
    if (depth == order_.size()) {
      found_.push_back(image_);
      return;
    }
    const auto [q, anchor] = order_[depth];
    auto attempt = [&](int t) {
      if (!feasible(q, t)) {
        return;
      }
      image_[q] = t;
      used_[t] = true;
      search(depth + 1);
      used_[t] = false;
      image_[q] = -1;
    };
    if (anchor >= 0) {
      for (const auto &nb : target_.neighbors(image_[anchor])) {
        attempt(nb.atom);
        if (found_.size() >= limit_) {
          return;
        }
      }
    } else {
      for (int t = 0; t < target_.atom_count(); ++t) {
        attempt(t);
        if (found_.size() >= limit_) {
          return;
        }
      }
    }
  }

  const Molecule &query_;
  const Molecule &target_;
  std::size_t limit_;
  std::vector<Step> order_;
  AtomMapping image_;
  std::vector<bool> used_;
  std::vector<AtomMapping> found_;
};

}  // namespace

std::vector<AtomMapping> match_substructure(const Molecule &query,
                                            const Molecule &target,
                                            std::size_t max_matches) {
  if (query.empty()) {
    throw InvalidParameter("substructure query is empty");
  }
  if (max_matches == 0 || query.atom_count() > target.atom_count()
      || query.bond_count() > target.bond_count()) {
    return {};
  }
  return Matcher(query, target, max_matches).run();
}

}  // namespace chemserve
