#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace chemserve {

struct Element {
  int atomic_number;
  std::string_view symbol;
  double standard_atomic_weight;
  std::span<const int> default_valences;  // ascending
  int group;                              // IUPAC group 1-18
};

// Closed element table: H plus B, C, N, O, F, Si, P, S, Cl, Se, Br, I.
std::span<const Element> supported_elements();

const Element *find_element(int atomic_number);
const Element *find_element(std::string_view symbol);

// Throws UnsupportedElement.
const Element &element(int atomic_number);
const Element &element(std::string_view symbol);

inline constexpr int kHydrogen = 1;
inline constexpr int kCarbon = 6;
inline constexpr int kNitrogen = 7;
inline constexpr int kOxygen = 8;

}  // namespace chemserve
