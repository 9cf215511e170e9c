#include "chemserve/element.h"

#include <array>
#include <string>

#include "chemserve/error.h"

namespace chemserve {
namespace {

constexpr std::array<int, 1> kMonovalent {1};
constexpr std::array<int, 1> kTrivalent {3};
constexpr std::array<int, 1> kTetravalent {4};
constexpr std::array<int, 1> kDivalent {2};
constexpr std::array<int, 2> kPnictogen {3, 5};
constexpr std::array<int, 3> kChalcogen {2, 4, 6};

// IUPAC standard atomic weights (conventional values).
const std::array<Element, 13> kElements {{
    {1, "H", 1.008, kMonovalent, 1},
    {5, "B", 10.81, kTrivalent, 13},
    {6, "C", 12.011, kTetravalent, 14},
    {7, "N", 14.007, kPnictogen, 15},
    {8, "O", 15.999, kDivalent, 16},
    {9, "F", 18.998, kMonovalent, 17},
    {14, "Si", 28.085, kTetravalent, 14},
    {15, "P", 30.974, kPnictogen, 15},
    {16, "S", 32.06, kChalcogen, 16},
    {17, "Cl", 35.45, kMonovalent, 17},
    {34, "Se", 78.971, kChalcogen, 16},
    {35, "Br", 79.904, kMonovalent, 17},
    {53, "I", 126.90, kMonovalent, 17},
}};

}  // namespace

std::span<const Element> supported_elements() { return kElements; }

const Element *find_element(int atomic_number) {
  for (const auto &e : kElements) {
    if (e.atomic_number == atomic_number) {
      return &e;
    }
  }
  return nullptr;
}

const Element *find_element(std::string_view symbol) {
  for (const auto &e : kElements) {
    if (e.symbol == symbol) {
      return &e;
    }
  }
  return nullptr;
}

const Element &element(int atomic_number) {
  if (const auto *e = find_element(atomic_number)) {
    return *e;
  }
  throw UnsupportedElement("unsupported atomic number "
                           + std::to_string(atomic_number));
}

const Element &element(std::string_view symbol) {
  if (const auto *e = find_element(symbol)) {
    return *e;
  }
  throw UnsupportedElement("unsupported element " + std::string(symbol));
}

}  // namespace chemserve
