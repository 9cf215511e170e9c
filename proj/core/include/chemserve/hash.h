#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>

namespace chemserve {

// Fixed 64-bit mixing used for fingerprints and cache keys. The constants
// are part of the on-disk contract (model files, caches): changing them
// changes every fingerprint.
//
//   mix64:        SplitMix64 finalizer (0xbf58476d1ce4e5b9, 0x94d049bb133111eb)
//   hash_combine: mix64(h ^ (v + 0x9e3779b97f4a7c15 + (h << 6) + (h >> 2)))
//   hash_words:   seed 0x243f6a8885a308d3, combine every word, then the length
//   hash_bytes:   FNV-1a 64 (offset 0xcbf29ce484222325, prime 0x100000001b3)
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

inline constexpr std::uint64_t kHashSeed = 0x243f6a8885a308d3ULL;

inline std::uint64_t hash_words(std::span<const std::uint64_t> words) {
  std::uint64_t h = kHashSeed;
  for (auto w : words) {
    h = hash_combine(h, w);
  }
  return hash_combine(h, words.size());
}

inline std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) {
  return hash_words(std::span<const std::uint64_t>(words.begin(), words.size()));
}

inline constexpr std::uint64_t hash_bytes(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace chemserve
