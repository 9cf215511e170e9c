#include "chemserve/store.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "chemserve/descriptors.h"
#include "chemserve/molfile.h"
#include "chemserve/smiles.h"

namespace chemserve {
namespace {

std::size_t slot(Resource resource) { return static_cast<std::size_t>(resource); }

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) {
      return out;
    }
    start = pos + 1;
  }
}

std::optional<long long> parse_integer(std::string_view s) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

std::optional<double> parse_real(std::string_view s) {
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size() ||
      !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

bool key_less(const Json &a, const Json &b) {
  if (a.is_number_integer() && b.is_number_integer()) {
    return a.get<long long>() < b.get<long long>();
  }
  if (a.is_string() && b.is_string()) {
    return a.get_ref<const std::string &>() < b.get_ref<const std::string &>();
  }
  return a.type() < b.type();
}

}  // namespace

const Json *ResourceTable::find(const std::string &key) const {
  const auto it = by_key_.find(key);
  return it == by_key_.end() ? nullptr : &records_[it->second];
}

Snapshot::Snapshot() : index_(std::make_shared<SearchIndex>()) { }

SnapshotBuilder::SnapshotBuilder(const Snapshot &base,
                                 const FingerprintParams &params)
    : params_(params) {
  for (Resource r : all_resources()) {
    for (const Json &record : base.table(r).records()) {
      tables_[slot(r)].emplace(record_key(r, record), record);
    }
  }
  if (base.index().params() == params) {
    for (const IndexEntry &entry : base.index().entries()) {
      index_entries_.emplace(entry.id, entry);
    }
  }
}

bool SnapshotBuilder::put(Resource resource, Json record) {
  const std::string key = record_key(resource, record);
  auto &table = tables_[slot(resource)];
  const bool replaced = table.contains(key);
  table.insert_or_assign(key, std::move(record));
  if (resource == Resource::kMolecule) {
    index_entries_.erase(key);
  }
  return replaced;
}

bool SnapshotBuilder::contains(Resource resource,
                               const std::string &key) const {
  return tables_[slot(resource)].contains(key);
}

void SnapshotBuilder::put_index_entry(IndexEntry entry) {
  std::string id = entry.id;
  index_entries_.insert_or_assign(std::move(id), std::move(entry));
}

std::shared_ptr<const Snapshot> SnapshotBuilder::finish() {
  const FingerprintParams &params = params_;
  auto snapshot = std::make_shared<Snapshot>();
  for (Resource r : all_resources()) {
    const std::string_view key_field = schema(r).key_field;
    ResourceTable &table = snapshot->tables_[slot(r)];
    for (auto &[key, record] : tables_[slot(r)]) {
      table.records_.push_back(std::move(record));
    }
    std::sort(table.records_.begin(), table.records_.end(),
              [&](const Json &a, const Json &b) {
                return key_less(*lookup(a, key_field), *lookup(b, key_field));
              });
    for (std::size_t i = 0; i < table.records_.size(); ++i) {
      table.by_key_.emplace(record_key(r, table.records_[i]), i);
    }
  }
  std::vector<IndexEntry> entries;
  for (const Json &record :
       snapshot->tables_[slot(Resource::kMolecule)].records_) {
    std::string id = record_key(Resource::kMolecule, record);
    const auto it = index_entries_.find(id);
    if (it != index_entries_.end()) {
      entries.push_back(std::move(it->second));
      continue;
    }
    Molecule mol = parse_smiles(
        lookup(record, "molecule_structures.canonical_smiles")
            ->get<std::string>());
    Fingerprint fp = fingerprint(mol, params);
    Fingerprint screen = screen_fingerprint(mol);
    entries.push_back(IndexEntry {std::move(id), std::move(mol),
                                  std::move(fp), std::move(screen)});
  }
  tables_ = {};
  index_entries_.clear();
  snapshot->index_ = std::make_shared<SearchIndex>(
      SearchIndex::from_entries(std::move(entries), params));
  return snapshot;
}

CompoundRecord make_compound_record(std::string chembl_id,
                                    std::optional<std::string> pref_name,
                                    int max_phase, const Molecule &mol) {
  CompoundRecord record;
  record.molecule_chembl_id = std::move(chembl_id);
  record.pref_name = std::move(pref_name);
  record.max_phase = max_phase;
  record.molecule_structures.canonical_smiles = write_smiles(mol);
  record.molecule_structures.molfile = write_ctab(mol);
  record.molecule_properties = compute_descriptors(mol);
  return record;
}

ResultPage execute_query(const Snapshot &snapshot, const Query &query) {
  const std::vector<FilterClause> clauses = compile_filters(query);
  std::vector<Json> matches;
  for (const Json &record : snapshot.table(query.resource).records()) {
    if (std::all_of(clauses.begin(), clauses.end(),
                    [&](const FilterClause &c) {
                      return clause_matches(c, record);
                    })) {
      matches.push_back(record);
    }
  }
  if (!query.order_by.empty()) {
    std::stable_sort(matches.begin(), matches.end(),
                     [&](const Json &a, const Json &b) {
                       return compare_records(query.order_by, a, b) < 0;
                     });
  }
  return make_page(std::move(matches), query.limit, query.offset);
}

Store::Store(FingerprintParams params)
    : params_(params), snapshot_(std::make_shared<Snapshot>()) { }

Store::Store(std::shared_ptr<const Snapshot> snapshot, FingerprintParams params)
    : params_(params), snapshot_(std::move(snapshot)) {
  if (snapshot_ == nullptr) {
    throw InvalidParameter("null snapshot");
  }
}

std::shared_ptr<const Snapshot> Store::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

void Store::publish(std::shared_ptr<const Snapshot> snapshot) {
  if (snapshot == nullptr) {
    throw InvalidParameter("null snapshot");
  }
  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(snapshot);
}

ResultPage Store::execute_query(const Query &query) const {
  return chemserve::execute_query(*snapshot(), query);
}

std::optional<Json> Store::get_by_id(Resource resource,
                                     const std::string &key) const {
  const auto snap = snapshot();
  const Json *record = snap->table(resource).find(key);
  if (record == nullptr) {
    return std::nullopt;
  }
  return std::optional<Json>(std::in_place, *record);
}

IngestReport Store::ingest_sdf(std::string_view sdf_text) {
  std::lock_guard writer(writer_mutex_);
  SnapshotBuilder builder(*snapshot(), params_);
  IngestReport report;
  const std::vector<std::string> records = split_sdf(sdf_text);
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      SdfEntry entry = parse_sdf_entry(records[i], i);
      const std::string *id = entry.properties.find("chembl_id");
      if (id == nullptr || id->empty()) {
        throw IngestError(i, "missing chembl_id property");
      }
      int max_phase = 0;
      if (const std::string *phase = entry.properties.find("max_phase")) {
        const auto v = parse_integer(*phase);
        if (!v || *v < 0 || *v > 4) {
          throw IngestError(i, "max_phase must be an integer 0-4, got '" +
                                   *phase + "'");
        }
        max_phase = static_cast<int>(*v);
      }
      std::optional<std::string> pref_name;
      if (const std::string *name = entry.properties.find("pref_name");
          name != nullptr && !name->empty()) {
        pref_name = *name;
      }
      const CompoundRecord record =
          make_compound_record(*id, pref_name, max_phase, entry.molecule);
      if (builder.put(Resource::kMolecule, to_json(record))) {
        ++report.replaced;
      }
      ++report.ingested;
    } catch (const IngestError &e) {
      report.errors.push_back(e);
    } catch (const Error &e) {
      report.errors.emplace_back(i, e.what());
    }
  }
  publish(builder.finish());
  return report;
}

IngestReport Store::ingest_tsv(Resource resource, std::string_view tsv_text) {
  if (resource == Resource::kMolecule) {
    throw InvalidParameter("molecules are ingested from SDF");
  }
  const ResourceSchema &s = schema(resource);
  std::vector<std::string_view> lines = split(tsv_text, '\n');
  for (auto &line : lines) {
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
  }
  if (lines.empty() || lines.front().empty()) {
    throw IngestError(1, "missing header row");
  }
  std::vector<const FieldSpec *> columns;
  for (std::string_view name : split(lines.front(), '\t')) {
    const FieldSpec *field = s.field(name);
    if (field == nullptr) {
      throw IngestError(1, "unknown column '" + std::string(name) + "'");
    }
    if (std::find(columns.begin(), columns.end(), field) != columns.end()) {
      throw IngestError(1, "duplicate column '" + std::string(name) + "'");
    }
    columns.push_back(field);
  }
  for (const FieldSpec &field : s.fields) {
    if (!field.optional &&
        std::find(columns.begin(), columns.end(), &field) == columns.end()) {
      throw IngestError(1, field.path == s.key_field
                               ? "missing key column '" +
                                     std::string(field.path) + "'"
                               : "missing column '" + std::string(field.path) +
                                     "'");
    }
  }

  std::lock_guard writer(writer_mutex_);
  SnapshotBuilder builder(*snapshot(), params_);
  IngestReport report;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    if (lines[n].empty()) {
      continue;
    }
    try {
      const auto cells = split(lines[n], '\t');
      if (cells.size() != columns.size()) {
        throw IngestError(line_no, "expected " +
                                       std::to_string(columns.size()) +
                                       " cells, found " +
                                       std::to_string(cells.size()));
      }
      Json record = Json::object();
      for (const FieldSpec &field : s.fields) {
        record[std::string(field.path)] = nullptr;
      }
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const FieldSpec &field = *columns[c];
        const std::string name(field.path);
        if (cells[c].empty()) {
          if (!field.optional) {
            throw IngestError(line_no, "empty value for '" + name + "'");
          }
          continue;
        }
        switch (field.type) {
        case FieldType::kText:
          record[name] = std::string(cells[c]);
          break;
        case FieldType::kInteger:
          if (const auto v = parse_integer(cells[c])) {
            record[name] = *v;
          } else {
            throw IngestError(line_no, "'" + name + "' is not an integer: '" +
                                           std::string(cells[c]) + "'");
          }
          break;
        case FieldType::kReal:
          if (const auto v = parse_real(cells[c])) {
            record[name] = *v;
          } else {
            throw IngestError(line_no, "'" + name + "' is not a number: '" +
                                           std::string(cells[c]) + "'");
          }
          break;
        }
      }
      for (const char *fk : {"molecule_chembl_id", "target_chembl_id"}) {
        const Json *ref = lookup(record, fk);
        if (ref == nullptr || schema(resource).key_field == fk) {
          continue;
        }
        const Resource owner = std::string_view(fk) == "molecule_chembl_id"
                                   ? Resource::kMolecule
                                   : Resource::kTarget;
        if (!builder.contains(owner, ref->get<std::string>())) {
          ++report.dangling;
        }
      }
      if (builder.put(resource, std::move(record))) {
        ++report.replaced;
      }
      ++report.ingested;
    } catch (const IngestError &e) {
      report.errors.push_back(e);
    }
  }
  publish(builder.finish());
  return report;
}

}  // namespace chemserve
