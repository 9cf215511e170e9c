#include "fixture.h"

#include <stdexcept>

#include "oracles.h"

namespace chemserve::testing {
namespace {

void expect_clean(const IngestReport &report, const char *what) {
  if (!report.errors.empty()) {
    throw std::runtime_error(std::string(what) + ": " +
                             report.errors.front().what());
  }
}

}  // namespace

std::unique_ptr<Store> load_fixture_store() {
  auto store = std::make_unique<Store>();
  expect_clean(store->ingest_sdf(read_file(data_path("molecules.sdf"))),
               "molecules.sdf");
  expect_clean(store->ingest_tsv(Resource::kTarget,
                                 read_file(data_path("targets.tsv"))),
               "targets.tsv");
  expect_clean(store->ingest_tsv(Resource::kActivity,
                                 read_file(data_path("activities.tsv"))),
               "activities.tsv");
  expect_clean(store->ingest_tsv(Resource::kMechanism,
                                 read_file(data_path("mechanisms.tsv"))),
               "mechanisms.tsv");
  return store;
}

}  // namespace chemserve::testing
