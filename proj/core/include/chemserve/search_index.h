#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chemserve/fingerprint.h"
#include "chemserve/molecule.h"

namespace chemserve {

struct IndexEntry {
  std::string id;
  Molecule molecule;
  Fingerprint fingerprint;
  Fingerprint screen;
};

struct SimilarityHit {
  std::string id;
  double score;

  friend bool operator==(const SimilarityHit &, const SimilarityHit &) =
      default;
};

// Immutable compound collection with per-entry similarity and screening
// fingerprints.
class SearchIndex {
public:
  SearchIndex() = default;

  // Throws DuplicateId.
  static SearchIndex build(std::vector<std::pair<std::string, Molecule>> compounds,
                           const FingerprintParams &params = {});
  // Reassembles an index from stored entries (e.g. a snapshot). Similarity
  // fingerprints must match `params`; screens are recomputed when their
  // width differs from the default. Throws DuplicateId, InvalidParameter.
  static SearchIndex from_entries(std::vector<IndexEntry> entries,
                                  const FingerprintParams &params);

  std::size_t size() const { return entries_.size(); }
  const std::vector<IndexEntry> &entries() const { return entries_; }
  const IndexEntry *find(const std::string &id) const;
  const FingerprintParams &params() const { return params_; }

  // Entries with Tanimoto >= threshold, sorted by score desc then id asc.
  // Throws InvalidParameter unless 0 < threshold <= 1.
  std::vector<SimilarityHit> similarity_search(const Molecule &query,
                                               double threshold) const;

  // Ids (index order) of entries containing `query`; candidates are screened
  // by path fingerprints before the graph match.
  // Throws InvalidParameter for an empty query.
  std::vector<std::string> substructure_search(const Molecule &query) const;

private:
  std::vector<IndexEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
  FingerprintParams params_;
};

}  // namespace chemserve
