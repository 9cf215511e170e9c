#include "chemserve/search_index.h"

#include <algorithm>

#include "chemserve/error.h"
#include "chemserve/substructure.h"

namespace chemserve {

SearchIndex SearchIndex::build(
    std::vector<std::pair<std::string, Molecule>> compounds,
    const FingerprintParams &params) {
  std::vector<IndexEntry> entries;
  entries.reserve(compounds.size());
  for (auto &[id, mol] : compounds) {
    Fingerprint fp = fingerprint(mol, params);
    Fingerprint screen = screen_fingerprint(mol);
    entries.push_back({std::move(id), std::move(mol), std::move(fp),
                       std::move(screen)});
  }
  return from_entries(std::move(entries), params);
}

SearchIndex SearchIndex::from_entries(std::vector<IndexEntry> entries,
                                      const FingerprintParams &params) {
  SearchIndex index;
  index.params_ = params;
  index.entries_ = std::move(entries);
  const int screen_bits = screen_fingerprint(Molecule {}).nbits();
  for (std::size_t i = 0; i < index.entries_.size(); ++i) {
    auto &entry = index.entries_[i];
    if (!index.by_id_.emplace(entry.id, i).second) {
      throw DuplicateId(entry.id);
    }
    if (entry.fingerprint.nbits() != params.nbits) {
      throw InvalidParameter("entry " + entry.id
                             + " has a fingerprint of the wrong width");
    }
    if (entry.screen.nbits() != screen_bits) {
      entry.screen = screen_fingerprint(entry.molecule);
    }
  }
  return index;
}

const IndexEntry *SearchIndex::find(const std::string &id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

std::vector<SimilarityHit> SearchIndex::similarity_search(
    const Molecule &query, double threshold) const {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw InvalidParameter("similarity threshold must be in (0, 1]");
  }
  const Fingerprint q = fingerprint(query, params_);
  std::vector<SimilarityHit> hits;
  for (const auto &entry : entries_) {
    // Tanimoto never exceeds min/max of the two popcounts.
    const int lo = std::min(q.popcount(), entry.fingerprint.popcount());
    const int hi = std::max(q.popcount(), entry.fingerprint.popcount());
    if (hi > 0 && static_cast<double>(lo) / hi < threshold) {
      continue;
    }
    const double score = tanimoto(q, entry.fingerprint);
    if (score >= threshold) {
      hits.push_back({entry.id, score});
    }
  }
  std::sort(hits.begin(), hits.end(),
            [](const SimilarityHit &x, const SimilarityHit &y) {
              if (x.score != y.score) {
                return x.score > y.score;
              }
              return x.id < y.id;
            });
  return hits;
}

std::vector<std::string> SearchIndex::substructure_search(
    const Molecule &query) const {
  if (query.empty()) {
    throw InvalidParameter("substructure query is empty");
  }
  const Fingerprint screen = screen_fingerprint(query);
  std::vector<std::string> ids;
  for (const auto &entry : entries_) {
    if (entry.molecule.atom_count() < query.atom_count()
        || !entry.screen.contains(screen)) {
      continue;
    }
    if (has_substructure(query, entry.molecule)) {
      ids.push_back(entry.id);
    }
  }
  return ids;
}

}  // namespace chemserve
