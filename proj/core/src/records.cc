#include "chemserve/records.h"

#include <array>

namespace chemserve {
namespace {

constexpr std::array<FieldSpec, 11> kMoleculeFields {{
    {"molecule_chembl_id", FieldType::kText, false},
    {"pref_name", FieldType::kText, true},
    {"max_phase", FieldType::kInteger, false},
    {"molecule_structures.canonical_smiles", FieldType::kText, false},
    {"molecule_structures.molfile", FieldType::kText, false},
    {"molecule_properties.molecular_weight", FieldType::kReal, false},
    {"molecule_properties.heavy_atom_count", FieldType::kInteger, false},
    {"molecule_properties.ring_count", FieldType::kInteger, false},
    {"molecule_properties.rotatable_bonds", FieldType::kInteger, false},
    {"molecule_properties.hbd", FieldType::kInteger, false},
    {"molecule_properties.hba", FieldType::kInteger, false},
}};

constexpr std::array<FieldSpec, 3> kTargetFields {{
    {"target_chembl_id", FieldType::kText, false},
    {"pref_name", FieldType::kText, false},
    {"organism", FieldType::kText, true},
}};

constexpr std::array<FieldSpec, 6> kActivityFields {{
    {"activity_id", FieldType::kInteger, false},
    {"molecule_chembl_id", FieldType::kText, false},
    {"target_chembl_id", FieldType::kText, false},
    {"standard_type", FieldType::kText, false},
    {"standard_value", FieldType::kReal, true},
    {"standard_units", FieldType::kText, true},
}};

constexpr std::array<FieldSpec, 5> kMechanismFields {{
    {"mec_id", FieldType::kInteger, false},
    {"molecule_chembl_id", FieldType::kText, false},
    {"target_chembl_id", FieldType::kText, false},
    {"mechanism_of_action", FieldType::kText, false},
    {"action_type", FieldType::kText, true},
}};

const std::array<ResourceSchema, 4> kSchemas {{
    {Resource::kMolecule, "molecule", "molecules", "molecule_chembl_id",
     kMoleculeFields},
    {Resource::kTarget, "target", "targets", "target_chembl_id", kTargetFields},
    {Resource::kActivity, "activity", "activities", "activity_id",
     kActivityFields},
    {Resource::kMechanism, "mechanism", "mechanisms", "mec_id",
     kMechanismFields},
}};

constexpr std::array<Resource, 4> kResources {
    Resource::kMolecule, Resource::kTarget, Resource::kActivity,
    Resource::kMechanism};

template <class T>
Json optional_json(const std::optional<T> &value) {
  return value ? Json(*value) : Json(nullptr);
}

}  // namespace

const FieldSpec *ResourceSchema::field(std::string_view path) const {
  for (const auto &f : fields) {
    if (f.path == path) {
      return &f;
    }
  }
  return nullptr;
}

const ResourceSchema &schema(Resource resource) {
  return kSchemas[static_cast<std::size_t>(resource)];
}

std::span<const Resource> all_resources() { return kResources; }

std::optional<Resource> resource_from_name(std::string_view name) {
  for (const auto &s : kSchemas) {
    if (s.name == name) {
      return s.resource;
    }
  }
  return std::nullopt;
}

Json descriptors_to_json(const DescriptorSet &d) {
  return Json {{"molecular_weight", d.molecular_weight},
               {"heavy_atom_count", d.heavy_atom_count},
               {"ring_count", d.ring_count},
               {"rotatable_bonds", d.rotatable_bonds},
               {"hbd", d.hbd},
               {"hba", d.hba}};
}

Json to_json(const CompoundRecord &r) {
  return Json {
      {"molecule_chembl_id", r.molecule_chembl_id},
      {"pref_name", optional_json(r.pref_name)},
      {"max_phase", r.max_phase},
      {"molecule_structures",
       {{"canonical_smiles", r.molecule_structures.canonical_smiles},
        {"molfile", r.molecule_structures.molfile}}},
      {"molecule_properties", descriptors_to_json(r.molecule_properties)},
  };
}

Json to_json(const TargetRecord &r) {
  return Json {{"target_chembl_id", r.target_chembl_id},
               {"pref_name", r.pref_name},
               {"organism", optional_json(r.organism)}};
}

Json to_json(const ActivityRecord &r) {
  return Json {{"activity_id", r.activity_id},
               {"molecule_chembl_id", r.molecule_chembl_id},
               {"target_chembl_id", r.target_chembl_id},
               {"standard_type", r.standard_type},
               {"standard_value", optional_json(r.standard_value)},
               {"standard_units", optional_json(r.standard_units)}};
}

Json to_json(const MechanismRecord &r) {
  return Json {{"mec_id", r.mec_id},
               {"molecule_chembl_id", r.molecule_chembl_id},
               {"target_chembl_id", r.target_chembl_id},
               {"mechanism_of_action", r.mechanism_of_action},
               {"action_type", optional_json(r.action_type)}};
}

const Json *lookup(const Json &record, std::string_view path) {
  const Json *node = &record;
  while (true) {
    const auto dot = path.find('.');
    const std::string part(path.substr(0, dot));
    if (!node->is_object()) {
      return nullptr;
    }
    const auto it = node->find(part);
    if (it == node->end()) {
      return nullptr;
    }
    node = &*it;
    if (dot == std::string_view::npos) {
      break;
    }
    path.remove_prefix(dot + 1);
  }
  return node->is_null() ? nullptr : node;
}

std::string record_key(Resource resource, const Json &record) {
  const Json *key = lookup(record, schema(resource).key_field);
  if (key == nullptr) {
    return {};
  }
  return key->is_string() ? key->get<std::string>() : key->dump();
}

}  // namespace chemserve
