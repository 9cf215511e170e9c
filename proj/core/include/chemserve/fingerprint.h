#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chemserve/molecule.h"

namespace chemserve {

// Fixed-width bit vector. Width is a power of two.
class Fingerprint {
public:
  // Throws InvalidParameter unless nbits is a positive power of two.
  explicit Fingerprint(int nbits = 2048);

  int nbits() const { return nbits_; }
  int popcount() const { return popcount_; }
  bool empty() const { return popcount_ == 0; }

  bool test(int bit) const;
  void set(int bit);
  // Sets bit (hash mod nbits).
  void set_hashed(std::uint64_t hash);

  std::span<const std::uint64_t> words() const { return words_; }
  std::vector<int> on_bits() const;

  // True when every bit of `sub` is set here. Throws InvalidParameter on
  // width mismatch.
  bool contains(const Fingerprint &sub) const;

  // Lowercase hex, most significant nibble first, nbits/4 digits (at least 1).
  std::string to_hex() const;
  // Throws InvalidParameter on bad digits or length.
  static Fingerprint from_hex(std::string_view hex, int nbits);

  friend bool operator==(const Fingerprint &a, const Fingerprint &b) {
    return a.nbits_ == b.nbits_ && a.words_ == b.words_;
  }

private:
  int nbits_;
  int popcount_ = 0;
  std::vector<std::uint64_t> words_;
};

struct FingerprintParams {
  int radius = 2;
  int nbits = 2048;

  friend bool operator==(const FingerprintParams &,
                         const FingerprintParams &) = default;
};

// Circular (Morgan-style) fingerprint. Each atom starts from the hash of
// (atomic number, degree, hydrogen count, charge, ring flag, aromatic flag);
// every iteration hashes the own identifier followed by the sorted
// (bond code, neighbor identifier) pairs. Identifiers of all iterations
// 0..radius set bits.
// Throws InvalidParameter for negative radius or bad nbits.
Fingerprint fingerprint(const Molecule &mol, int radius = 2, int nbits = 2048);

inline Fingerprint fingerprint(const Molecule &mol,
                               const FingerprintParams &params) {
  return fingerprint(mol, params.radius, params.nbits);
}

// Screening fingerprint for substructure search: labeled simple paths of up
// to `max_bonds` bonds (atoms labeled by element and aromaticity). Every
// feature of a query is present in any molecule that contains the query, so
// `target.contains(query)` never rejects a true match.
Fingerprint screen_fingerprint(const Molecule &mol, int max_bonds = 3,
                               int nbits = 1024);

// |A and B| / |A or B|; 1.0 when both are empty.
// Throws InvalidParameter on width mismatch.
double tanimoto(const Fingerprint &a, const Fingerprint &b);

}  // namespace chemserve
