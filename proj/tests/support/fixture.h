#pragma once

// The bundled record fixture: 45 compounds, 5 targets, 10 activities and
// 7 mechanisms. Five mechanism rows point at CHEMBL1824; three of those
// compounds are approved (max_phase 4).

#include <array>
#include <memory>
#include <string>

#include "chemserve/store.h"

namespace chemserve::testing {

inline constexpr const char *kFixtureTarget = "CHEMBL1824";
inline constexpr int kFixtureCompoundCount = 45;

inline const std::array<std::string, 5> kMechanismCompounds {
    "CHEMBL90001", "CHEMBL90002", "CHEMBL90003", "CHEMBL90004", "CHEMBL90005"};
inline const std::array<std::string, 3> kApprovedCompounds {
    "CHEMBL90001", "CHEMBL90002", "CHEMBL90003"};

// Fresh store with every fixture file ingested. Throws if any row fails.
std::unique_ptr<Store> load_fixture_store();

}  // namespace chemserve::testing
