#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chemserve/error.h"
#include "chemserve/query.h"
#include "chemserve/records.h"
#include "chemserve/search_index.h"

namespace chemserve {

// Records of one resource in ascending primary-key order.
class ResourceTable {
public:
  const std::vector<Json> &records() const { return records_; }
  const Json *find(const std::string &key) const;
  std::size_t size() const { return records_.size(); }

private:
  friend class SnapshotBuilder;
  std::vector<Json> records_;
  std::unordered_map<std::string, std::size_t> by_key_;
};

// Immutable view of every resource plus the compound search index.
class Snapshot {
public:
  Snapshot();

  const ResourceTable &table(Resource resource) const {
    return tables_[static_cast<std::size_t>(resource)];
  }
  const SearchIndex &index() const { return *index_; }

private:
  friend class SnapshotBuilder;
  std::array<ResourceTable, 4> tables_;
  std::shared_ptr<const SearchIndex> index_;
};

// Mutable staging area used by ingestion and snapshot loading.
class SnapshotBuilder {
public:
  // Index entries of `base` are reused only when built with `params`.
  SnapshotBuilder(const Snapshot &base, const FingerprintParams &params);

  // Returns true when an existing record was replaced.
  bool put(Resource resource, Json record);
  bool contains(Resource resource, const std::string &key) const;
  // Index entry for a molecule record, built with the builder's params. If
  // omitted, `finish` computes it.
  void put_index_entry(IndexEntry entry);

  std::shared_ptr<const Snapshot> finish();

private:
  std::array<std::unordered_map<std::string, Json>, 4> tables_;
  std::unordered_map<std::string, IndexEntry> index_entries_;
  FingerprintParams params_;
};

struct IngestReport {
  std::size_t ingested = 0;
  std::size_t replaced = 0;  // last-write-wins warnings
  std::size_t dangling = 0;  // foreign keys with no matching record
  std::vector<IngestError> errors;
};

// Builds a compound record (canonical SMILES, molfile and descriptors).
CompoundRecord make_compound_record(std::string chembl_id,
                                    std::optional<std::string> pref_name,
                                    int max_phase, const Molecule &mol);

// Runs a query against one snapshot.
// Throws UnknownField, UnknownOperator, TypeMismatch, InvalidParameter.
ResultPage execute_query(const Snapshot &snapshot, const Query &query);

class Store {
public:
  explicit Store(FingerprintParams params = {});
  Store(std::shared_ptr<const Snapshot> snapshot, FingerprintParams params);

  // SDF entries become compounds keyed by the "chembl_id" property; "max_phase"
  // defaults to 0 and "pref_name" is optional. Bad entries are reported by
  // 0-based entry index and skipped.
  IngestReport ingest_sdf(std::string_view sdf_text);
  // Target, activity or mechanism rows. Header problems throw IngestError;
  // row problems are reported by 1-based line number and skipped.
  IngestReport ingest_tsv(Resource resource, std::string_view tsv_text);

  ResultPage execute_query(const Query &query) const;
  std::optional<Json> get_by_id(Resource resource,
                                const std::string &key) const;

  // Current published snapshot; stays valid while held.
  std::shared_ptr<const Snapshot> snapshot() const;
  void publish(std::shared_ptr<const Snapshot> snapshot);
  const FingerprintParams &params() const { return params_; }

private:
  FingerprintParams params_;
  mutable std::mutex snapshot_mutex_;
  std::mutex writer_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
};

}  // namespace chemserve
