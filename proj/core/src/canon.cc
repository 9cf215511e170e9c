#include "chemserve/canon.h"

#include <algorithm>
#include <array>
#include <numeric>
#include <tuple>
#include <utility>

namespace chemserve {
namespace {

using InitialKey = std::array<int, 6>;

InitialKey initial_key(const Molecule &mol, int i) {
  const Atom &atom = mol.atom(i);
  return {atom.atomic_number(), mol.degree(i), atom.implicit_h,
          atom.formal_charge, atom.in_ring ? 1 : 0, atom.aromatic ? 1 : 0};
}

// Assigns each atom the number of atoms whose key sorts strictly before it.
template <class Key>
std::vector<int> positional_classes(const std::vector<Key> &keys) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return keys[x] < keys[y]; });
  std::vector<int> classes(n);
  for (int pos = 0; pos < n; ++pos) {
    if (pos > 0 && keys[order[pos]] == keys[order[pos - 1]]) {
      classes[order[pos]] = classes[order[pos - 1]];
    } else {
      classes[order[pos]] = pos;
    }
  }
  return classes;
}

int distinct_count(const std::vector<int> &classes) {
  std::vector<int> sorted = classes;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<int>(std::unique(sorted.begin(), sorted.end())
                          - sorted.begin());
}

using RefineKey = std::pair<int, std::vector<std::pair<int, int>>>;

std::vector<int> refine(const Molecule &mol, std::vector<int> classes) {
  const int n = mol.atom_count();
  int count = distinct_count(classes);
  std::vector<RefineKey> keys(n);
  while (count < n) {
    for (int i = 0; i < n; ++i) {
      auto &[own, around] = keys[i];
      own = classes[i];
      around.clear();
      for (const auto &nb : mol.neighbors(i)) {
        around.emplace_back(classes[nb.atom], bond_code(mol.bond(nb.bond).order));
      }
      std::sort(around.begin(), around.end());
    }
    auto next = positional_classes(keys);
    const int next_count = distinct_count(next);
    classes = std::move(next);
    if (next_count == count) {
      break;
    }
    count = next_count;
  }
  return classes;
}

}  // namespace

std::vector<int> canonical_ranks(const Molecule &mol) {
  const int n = mol.atom_count();
  std::vector<InitialKey> initial(n);
  for (int i = 0; i < n; ++i) {
    initial[i] = initial_key(mol, i);
  }
  auto classes = refine(mol, positional_classes(initial));

  while (distinct_count(classes) < n) {
    // Lowest class value shared by more than one atom.
    std::vector<int> members(n, 0);
    for (int c : classes) {
      ++members[c];
    }
    int tied = 0;
    while (members[tied] < 2) {
      ++tied;
    }
    int chosen = -1;
    for (int i = 0; i < n; ++i) {
      if (classes[i] == tied) {
        if (chosen < 0) {
          chosen = i;
        } else {
          classes[i] = tied + 1;
        }
      }
    }
    classes = refine(mol, std::move(classes));
  }
  return classes;
}

}  // namespace chemserve
