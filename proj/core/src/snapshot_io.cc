#include "chemserve/snapshot_io.h"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "chemserve/smiles.h"

namespace chemserve {
namespace {

constexpr std::string_view kFormatName = "chemserve-snapshot";

}  // namespace

Json snapshot_to_json(const Snapshot &snapshot) {
  const FingerprintParams &params = snapshot.index().params();
  Json records = Json::object();
  for (Resource r : all_resources()) {
    records[std::string(schema(r).name)] = snapshot.table(r).records();
  }
  Json index = Json::array();
  for (const IndexEntry &entry : snapshot.index().entries()) {
    index.push_back({{"id", entry.id},
                     {"fingerprint", entry.fingerprint.to_hex()},
                     {"screen", entry.screen.to_hex()},
                     {"screen_nbits", entry.screen.nbits()}});
  }
  return Json {{"format", kFormatName},
               {"version", kSnapshotVersion},
               {"fingerprint", {{"radius", params.radius},
                                {"nbits", params.nbits}}},
               {"records", std::move(records)},
               {"index", std::move(index)}};
}

std::shared_ptr<const Snapshot> snapshot_from_json(const Json &doc) {
  try {
    if (!doc.is_object() || doc.value("format", "") != kFormatName) {
      throw FormatError(0, "not a chemserve snapshot");
    }
    const int version = doc.at("version").get<int>();
    if (version != kSnapshotVersion) {
      throw FormatError(0, "unsupported snapshot version " +
                               std::to_string(version) + " (supported: " +
                               std::to_string(kSnapshotVersion) + ")");
    }
    FingerprintParams params;
    params.radius = doc.at("fingerprint").at("radius").get<int>();
    params.nbits = doc.at("fingerprint").at("nbits").get<int>();

    Snapshot empty;
    SnapshotBuilder builder(empty, params);
    const Json &records = doc.at("records");
    for (Resource r : all_resources()) {
      const auto it = records.find(std::string(schema(r).name));
      if (it == records.end()) {
        continue;
      }
      for (const Json &record : *it) {
        if (lookup(record, schema(r).key_field) == nullptr) {
          throw FormatError(0, std::string(schema(r).name) +
                                   " record without key");
        }
        builder.put(r, record);
      }
    }
    std::unordered_map<std::string, std::string> smiles_by_id;
    if (const auto it = records.find("molecule"); it != records.end()) {
      for (const Json &record : *it) {
        smiles_by_id.emplace(
            record_key(Resource::kMolecule, record),
            record.at("molecule_structures").at("canonical_smiles"));
      }
    }
    for (const Json &item : doc.at("index")) {
      const std::string id = item.at("id").get<std::string>();
      const auto found = smiles_by_id.find(id);
      if (found == smiles_by_id.end()) {
        throw FormatError(0, "index entry without record: " + id);
      }
      builder.put_index_entry(IndexEntry {
          id, parse_smiles(found->second),
          Fingerprint::from_hex(item.at("fingerprint").get<std::string>(),
                                params.nbits),
          Fingerprint::from_hex(item.at("screen").get<std::string>(),
                                item.at("screen_nbits").get<int>())});
    }
    return builder.finish();
  } catch (const Json::exception &e) {
    throw FormatError(0, std::string("malformed snapshot: ") + e.what());
  }
}

void save_snapshot(const Snapshot &snapshot,
                   const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << snapshot_to_json(snapshot).dump() << '\n';
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

std::shared_ptr<const Snapshot> load_snapshot(
    const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const Json doc = Json::parse(buffer.str(), nullptr, false);
  if (doc.is_discarded()) {
    throw FormatError(0, "snapshot is not valid JSON");
  }
  return snapshot_from_json(doc);
}

}  // namespace chemserve
