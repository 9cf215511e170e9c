#pragma once

#include <filesystem>
#include <memory>

#include "chemserve/store.h"

namespace chemserve {

// Snapshot archive: a JSON document
//   {"format": "chemserve-snapshot", "version": 1,
//    "fingerprint": {"radius": r, "nbits": n},
//    "records": {"molecule": [...], "target": [...], ...},
//    "index": [{"id": ..., "fingerprint": hex, "screen": hex}, ...]}
// Index molecules are rebuilt from canonical SMILES on load.
inline constexpr int kSnapshotVersion = 1;

Json snapshot_to_json(const Snapshot &snapshot);
// Throws FormatError for a foreign document or unsupported version.
std::shared_ptr<const Snapshot> snapshot_from_json(const Json &doc);

// Throws IoError.
void save_snapshot(const Snapshot &snapshot, const std::filesystem::path &path);
// Throws IoError, FormatError.
std::shared_ptr<const Snapshot> load_snapshot(const std::filesystem::path &path);

}  // namespace chemserve
