#include "chemserve/fingerprint.h"

#include <algorithm>
#include <bit>
#include <string>

#include "chemserve/error.h"
#include "chemserve/hash.h"

namespace chemserve {
namespace {

void check_same_width(const Fingerprint &a, const Fingerprint &b) {
  if (a.nbits() != b.nbits()) {
    throw InvalidParameter("fingerprint widths differ: "
                           + std::to_string(a.nbits()) + " vs "
                           + std::to_string(b.nbits()));
  }
}

std::uint64_t as_word(int v) {
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(v));
}

}  // namespace

Fingerprint::Fingerprint(int nbits) : nbits_(nbits) {
  if (nbits <= 0 || !std::has_single_bit(static_cast<unsigned>(nbits))) {
    throw InvalidParameter("fingerprint width must be a power of two, got "
                           + std::to_string(nbits));
  }
  words_.assign((static_cast<std::size_t>(nbits) + 63) / 64, 0);
}

bool Fingerprint::test(int bit) const {
  return (words_[bit >> 6] >> (bit & 63)) & 1U;
}

void Fingerprint::set(int bit) {
  if (bit < 0 || bit >= nbits_) {
    throw InvalidParameter("bit index out of range");
  }
  auto &word = words_[bit >> 6];
  const std::uint64_t mask = std::uint64_t {1} << (bit & 63);
  if ((word & mask) == 0) {
    word |= mask;
    ++popcount_;
  }
}

void Fingerprint::set_hashed(std::uint64_t hash) {
  set(static_cast<int>(hash & static_cast<std::uint64_t>(nbits_ - 1)));
}

std::vector<int> Fingerprint::on_bits() const {
  std::vector<int> out;
  out.reserve(popcount_);
  for (int bit = 0; bit < nbits_; ++bit) {
    if (test(bit)) {
      out.push_back(bit);
    }
  }
  return out;
}

bool Fingerprint::contains(const Fingerprint &sub) const {
  check_same_width(*this, sub);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((sub.words_[i] & ~words_[i]) != 0) {
      return false;
    }
  }
  return true;
}

std::string Fingerprint::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const int digits = std::max(1, nbits_ / 4);
  std::string out(digits, '0');
  for (int d = 0; d < digits; ++d) {
    int nibble = 0;
    for (int k = 0; k < 4; ++k) {
      const int bit = d * 4 + k;
      if (bit < nbits_ && test(bit)) {
        nibble |= 1 << k;
      }
    }
    out[digits - 1 - d] = kDigits[nibble];
  }
  return out;
}

Fingerprint Fingerprint::from_hex(std::string_view hex, int nbits) {
  Fingerprint fp(nbits);
  const int digits = std::max(1, nbits / 4);
  if (static_cast<int>(hex.size()) != digits) {
    throw InvalidParameter("hex fingerprint has wrong length");
  }
  for (int d = 0; d < digits; ++d) {
    const char c = hex[digits - 1 - d];
    int nibble;
    if (c >= '0' && c <= '9') {
      nibble = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      nibble = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      nibble = c - 'A' + 10;
    } else {
      throw InvalidParameter("invalid hex digit in fingerprint");
    }
    for (int k = 0; k < 4; ++k) {
      if ((nibble >> k) & 1) {
        if (d * 4 + k >= nbits) {
          throw InvalidParameter("hex fingerprint sets bits beyond width");
        }
        fp.set(d * 4 + k);
      }
    }
  }
  return fp;
}

Fingerprint fingerprint(const Molecule &mol, int radius, int nbits) {
  if (radius < 0) {
    throw InvalidParameter("radius must be non-negative");
  }
  Fingerprint fp(nbits);
  const int n = mol.atom_count();
  std::vector<std::uint64_t> ids(n);
  for (int i = 0; i < n; ++i) {
    const Atom &atom = mol.atom(i);
    ids[i] = hash_words({as_word(atom.atomic_number()), as_word(mol.degree(i)),
                         as_word(atom.implicit_h), as_word(atom.formal_charge),
                         atom.in_ring ? 1U : 0U, atom.aromatic ? 1U : 0U});
    fp.set_hashed(ids[i]);
  }
  std::vector<std::uint64_t> next(n);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> around;
  std::vector<std::uint64_t> words;
  for (int r = 1; r <= radius; ++r) {
    for (int i = 0; i < n; ++i) {
      around.clear();
      for (const auto &nb : mol.neighbors(i)) {
        around.emplace_back(as_word(bond_code(mol.bond(nb.bond).order)),
                            ids[nb.atom]);
      }
      std::sort(around.begin(), around.end());
      words.clear();
      words.push_back(as_word(r));
      words.push_back(ids[i]);
      for (const auto &[code, id] : around) {
        words.push_back(code);
        words.push_back(id);
      }
      next[i] = hash_words(words);
      fp.set_hashed(next[i]);
    }
    ids.swap(next);
  }
  return fp;
}

namespace {

std::uint64_t atom_label(const Atom &atom) {
  return static_cast<std::uint64_t>(atom.atomic_number()) * 2
         + (atom.aromatic ? 1 : 0);
}

class PathEnumerator {
public:
  PathEnumerator(const Molecule &mol, int max_bonds, Fingerprint &fp)
      : mol_(mol), max_bonds_(max_bonds), fp_(fp),
        on_path_(mol.atom_count(), false) { }

  void run() {
    for (int start = 0; start < mol_.atom_count(); ++start) {
      labels_.assign(1, atom_label(mol_.atom(start)));
      on_path_[start] = true;
      emit();
      extend(start, 0);
      on_path_[start] = false;
    }
  }

private:
  // Hash of the path in the lexicographically smaller direction, so both
  // traversals of the same path set the same bit.
  void emit() {
    std::vector<std::uint64_t> reversed(labels_.rbegin(), labels_.rend());
    const auto &canonical =
        std::lexicographical_compare(reversed.begin(), reversed.end(),
                                     labels_.begin(), labels_.end())
            ? reversed
            : labels_;
    fp_.set_hashed(hash_words(canonical));
  }

  void extend(int atom, int depth) {
    if (depth == max_bonds_) {
      return;
    }
    for (const auto &nb : mol_.neighbors(atom)) {
      if (on_path_[nb.atom]) {
        continue;
      }
      // Bond codes are offset so they never collide with atom labels.
      labels_.push_back(1000 + bond_code(mol_.bond(nb.bond).order));
      labels_.push_back(atom_label(mol_.atom(nb.atom)));
      on_path_[nb.atom] = true;
      emit();
      extend(nb.atom, depth + 1);
      on_path_[nb.atom] = false;
      labels_.resize(labels_.size() - 2);
    }
  }

  const Molecule &mol_;
  int max_bonds_;
  Fingerprint &fp_;
  std::vector<bool> on_path_;
  std::vector<std::uint64_t> labels_;
};

}  // namespace

Fingerprint screen_fingerprint(const Molecule &mol, int max_bonds, int nbits) {
  if (max_bonds < 0) {
    throw InvalidParameter("path length must be non-negative");
  }
  Fingerprint fp(nbits);
  PathEnumerator(mol, max_bonds, fp).run();
  return fp;
}

double tanimoto(const Fingerprint &a, const Fingerprint &b) {
  check_same_width(a, b);
  int both = 0;
  int either = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    both += std::popcount(wa[i] & wb[i]);
    either += std::popcount(wa[i] | wb[i]);
  }
  if (either == 0) {
    return 1.0;
  }
  return static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace chemserve
