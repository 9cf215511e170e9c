#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chemserve/descriptors.h"

namespace chemserve {

using Json = nlohmann::json;

enum class Resource { kMolecule, kTarget, kActivity, kMechanism };

enum class FieldType { kText, kInteger, kReal };

struct FieldSpec {
  std::string_view path;  // dotted for nested fields
  FieldType type;
  bool optional;
};

struct ResourceSchema {
  Resource resource;
  std::string_view name;      // "molecule"
  std::string_view plural;    // "molecules"
  std::string_view key_field;
  std::span<const FieldSpec> fields;

  const FieldSpec *field(std::string_view path) const;
  const FieldSpec &key() const { return *field(key_field); }
};

const ResourceSchema &schema(Resource resource);
std::span<const Resource> all_resources();
// Accepts the singular name. Returns nullopt for unknown names.
std::optional<Resource> resource_from_name(std::string_view name);

struct MoleculeStructures {
  std::string canonical_smiles;
  std::string molfile;
};

struct CompoundRecord {
  std::string molecule_chembl_id;
  std::optional<std::string> pref_name;
  int max_phase = 0;
  MoleculeStructures molecule_structures;
  DescriptorSet molecule_properties;
};

struct TargetRecord {
  std::string target_chembl_id;
  std::string pref_name;
  std::optional<std::string> organism;
};

struct ActivityRecord {
  long long activity_id = 0;
  std::string molecule_chembl_id;
  std::string target_chembl_id;
  std::string standard_type;
  std::optional<double> standard_value;
  std::optional<std::string> standard_units;
};

struct MechanismRecord {
  long long mec_id = 0;
  std::string molecule_chembl_id;
  std::string target_chembl_id;
  std::string mechanism_of_action;
  std::optional<std::string> action_type;
};

// Wire representation: nested objects, absent optionals as null.
Json to_json(const CompoundRecord &record);
Json to_json(const TargetRecord &record);
Json to_json(const ActivityRecord &record);
Json to_json(const MechanismRecord &record);

Json descriptors_to_json(const DescriptorSet &descriptors);

// Value at a dotted path, or nullptr when absent.
const Json *lookup(const Json &record, std::string_view path);

// Primary key of a stored record rendered as text.
std::string record_key(Resource resource, const Json &record);

}  // namespace chemserve
