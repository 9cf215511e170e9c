// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <unistd.h>

#include "chemserve/canon.h"
#include "chemserve/client.h"
#include "chemserve/descriptors.h"
#include "chemserve/mcs.h"
#include "chemserve/molfile.h"
#include "chemserve/predict.h"
#include "chemserve/service.h"
#include "chemserve/smiles.h"
#include "chemserve/store.h"
#include "chemserve/substructure.h"
#include "chemserve/wire.h"
#include "fixture.h"
#include "oracles.h"
#include "wire_decode.h"

namespace chemserve {
namespace {

namespace fs = std::filesystem;
using Stopwatch = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failed expectation; later ones are ignored.
class Check {
public:
  bool expect(bool condition, const std::string &what) {
    if (!condition && outcome_.pass) {
      outcome_.pass = false;
      outcome_.detail = what;
    }
    return condition;
  }
  void note(const std::string &detail) {
    if (outcome_.pass) {
      outcome_.detail = detail;
    }
  }
  Outcome result() const { return outcome_; }

private:
  Outcome outcome_;
};

std::string join(const std::vector<std::string> &items) {
  std::string out;
  for (const std::string &item : items) {
    out += (out.empty() ? "" : ",") + item;
  }
  return out;
}

fs::path scratch_dir(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("chemserve_accept_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// A store served over a real socket for the lifetime of the object.
class LiveService {
public:
  explicit LiveService(const Store &store)
      : service_(store), server_(service_) {
    port_ = server_.bind("127.0.0.1", 0);
    server_.start();
  }
  ~LiveService() { server_.stop(); }

  std::string origin() const { return "http://127.0.0.1:" + std::to_string(port_); }
  httplib::Client http() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_url_encode(false);
    return c;
  }

private:
  Service service_;
  HttpServer server_;
  int port_ = 0;
};

Json get_json(const httplib::Client &c, const std::string &path) {
  auto &client = const_cast<httplib::Client &>(c);
  auto res = client.Get(path);
  if (!res) {
    throw TransportError("GET " + path + " failed");
  }
  if (res->status != 200) {
    throw ServiceError(res->status, res->body);
  }
  return Json::parse(res->body);
}

std::vector<std::string> ids_of(const std::vector<Json> &records,
                                const std::string &field) {
  std::vector<std::string> ids;
  for (const Json &r : records) {
    ids.push_back(r[field].get<std::string>());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<std::string> ids_of(const Json &records, const std::string &field) {
  return ids_of(records.get<std::vector<Json>>(), field);
}

// 1. mechanism -> molecule ids -> approved molecules via store, HTTP and client.
Outcome workflow_a(const Store &store, const LiveService &live) {
  Check check;
  const std::vector<std::string> expected(testing::kApprovedCompounds.begin(),
                                          testing::kApprovedCompounds.end());

  Query mech;
  mech.resource = Resource::kMechanism;
  mech.filters.push_back({"target_chembl_id", FilterOp::kExact, testing::kFixtureTarget});
  mech.limit = kMaxLimit;
  const ResultPage mech_page = store.execute_query(mech);
  check.expect(mech_page.total_count == 5, "store: expected 5 mechanism rows, got " +
                                               std::to_string(mech_page.total_count));
  const auto mol_ids = ids_of(mech_page.records, "molecule_chembl_id");
  Query approved;
  approved.resource = Resource::kMolecule;
  approved.filters.push_back({"molecule_chembl_id", FilterOp::kIn, Json(mol_ids)});
  approved.filters.push_back({"max_phase", FilterOp::kExact, 4});
  approved.limit = kMaxLimit;
  const auto via_store = ids_of(store.execute_query(approved).records, "molecule_chembl_id");

  const auto http = live.http();
  const Json mech_json = get_json(
      http, std::string("/api/data/mechanism?target_chembl_id=") +
                testing::kFixtureTarget + "&limit=1000");
  check.expect(mech_json["mechanisms"].size() == 5, "http: mechanism rows != 5");
  const Json mol_json = get_json(
      http, "/api/data/molecule?molecule_chembl_id__in=" +
                join(ids_of(mech_json["mechanisms"], "molecule_chembl_id")) +
                "&max_phase=4&limit=1000");
  const auto via_http = ids_of(mol_json["molecules"], "molecule_chembl_id");

  const fs::path cache_dir = scratch_dir("workflow_a");
  const Client client(live.origin(), nullptr, std::make_shared<ResponseCache>(cache_dir));
  const auto mechanisms = client.resource("mechanism")
                              .filter("target_chembl_id", FilterOp::kExact,
                                      testing::kFixtureTarget)
                              .iterate();
  check.expect(mechanisms.size() == 5, "client: mechanism rows != 5");
  const auto via_client =
      ids_of(client.resource("molecule")
                 .filter_in("molecule_chembl_id", ids_of(mechanisms, "molecule_chembl_id"))
                 .filter("max_phase", FilterOp::kExact, "4")
                 .iterate(),
             "molecule_chembl_id");
  fs::remove_all(cache_dir);

  check.expect(via_store == expected, "store returned " + join(via_store));
  check.expect(via_http == expected, "http returned " + join(via_http));
  check.expect(via_client == expected, "client returned " + join(via_client));
  check.note("store/http/client all returned " + join(expected));
  return check.result();
}

// 2. smiles2ctab then mcs through the service; the fragment embeds in every
// input and matches the exhaustive oracle size.
Outcome workflow_b(const Store &store, const LiveService &live) {
  Check check;
  std::string smiles_body;
  std::vector<Molecule> inputs;
  for (const std::string &id : testing::kApprovedCompounds) {
    const Json record = *store.get_by_id(Resource::kMolecule, id);
    const std::string smiles =
        record["molecule_structures"]["canonical_smiles"].get<std::string>();
    smiles_body += smiles + "\n";
    inputs.push_back(parse_smiles(smiles));
  }
  auto http = live.http();
  auto ctab = http.Post("/api/utils/smiles2ctab", smiles_body, "text/plain");
  if (!check.expect(ctab && ctab->status == 200, "smiles2ctab failed")) {
    return check.result();
  }
  check.expect(ctab->get_header_value("Content-Type") == "chemical/x-mdl-sdfile",
               "smiles2ctab content type");
  check.expect(parse_sdf(ctab->body).size() == 3, "smiles2ctab did not return 3 entries");
  auto mcs = http.Post("/api/utils/mcs", ctab->body, "chemical/x-mdl-sdfile");
  if (!check.expect(mcs && mcs->status == 200, "mcs failed")) {
    return check.result();
  }
  check.expect(mcs->get_header_value("X-MCS-Complete") == "true", "mcs incomplete");
  std::string fragment_smiles = mcs->body;
  while (!fragment_smiles.empty() && std::isspace(static_cast<unsigned char>(fragment_smiles.back()))) {
    fragment_smiles.pop_back();
  }
  const Molecule fragment = parse_smiles(fragment_smiles);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    check.expect(has_substructure(fragment, inputs[i]),
                 fragment_smiles + " does not embed in input " + std::to_string(i));
  }
  const int oracle = testing::brute_force_mcs(inputs).first;
  check.expect(fragment.heavy_atom_count() == oracle,
               "mcs size " + std::to_string(fragment.heavy_atom_count()) +
                   " != oracle " + std::to_string(oracle));
  check.note("mcs " + fragment_smiles + " (" + std::to_string(oracle) +
             " atoms = oracle) embeds in all 3");
  return check.result();
}

// 3. Canonical SMILES is invariant under atom permutation and idempotent.
Outcome canonicalization() {
  Check check;
  const auto corpus = testing::load_corpus();
  check.expect(corpus.size() == 50, "corpus has " + std::to_string(corpus.size()) + " molecules");
  std::mt19937_64 rng(31337);
  int identical = 0;
  int total = 0;
  int idempotent = 0;
  for (const auto &[smiles, name] : corpus) {
    const Molecule mol = parse_smiles(smiles);
    const std::string expected = write_smiles(mol);
    for (int k = 0; k < 20; ++k) {
      const auto perm = testing::random_permutation(mol.atom_count(), rng);
      identical += write_smiles(relabel(mol, perm)) == expected;
      ++total;
    }
    idempotent += canonical_smiles(expected) == expected;
  }
  check.expect(identical == total, std::to_string(identical) + "/" +
                                       std::to_string(total) + " permutations identical");
  check.expect(idempotent == static_cast<int>(corpus.size()),
               std::to_string(idempotent) + " idempotent");
  check.note(std::to_string(identical) + "/" + std::to_string(total) +
             " identical, " + std::to_string(idempotent) + "/" +
             std::to_string(corpus.size()) + " idempotent");
  return check.result();
}

// 4. Substructure presence equals brute-force enumeration; the path screen
// never drops a true match.
Outcome substructure_correctness() {
  Check check;
  std::vector<std::pair<std::string, Molecule>> small;
  for (const auto &[smiles, name] : testing::load_corpus()) {
    Molecule mol = parse_smiles(smiles);
    if (mol.heavy_atom_count() <= 10) {
      small.emplace_back(name, std::move(mol));
    }
  }
  const SearchIndex index = SearchIndex::build(small);
  int pairs = 0;
  int agree = 0;
  int matches = 0;
  int screen_false_negatives = 0;
  int index_disagreements = 0;
  for (const auto &[qname, query] : small) {
    const auto hits = index.substructure_search(query);
    const std::set<std::string> hit_set(hits.begin(), hits.end());
    for (const auto &[tname, target] : small) {
      const bool truth = testing::brute_force_embeddings(query, target, 1) > 0;
      ++pairs;
      agree += has_substructure(query, target) == truth;
      index_disagreements += hit_set.count(tname) != static_cast<std::size_t>(truth);
      if (truth) {
        ++matches;
        screen_false_negatives +=
            !screen_fingerprint(target).contains(screen_fingerprint(query));
      }
    }
  }
  check.expect(agree == pairs, std::to_string(agree) + "/" + std::to_string(pairs) + " agree");
  check.expect(index_disagreements == 0,
               std::to_string(index_disagreements) + " indexed-search disagreements");
  check.expect(screen_false_negatives == 0,
               std::to_string(screen_false_negatives) + " screen false negatives");
  check.note(std::to_string(agree) + "/" + std::to_string(pairs) + " pairs agree (" +
             std::to_string(small.size()) + " molecules, " + std::to_string(matches) +
             " matches), 0 screen false negatives");
  return check.result();
}

std::string percent_escape(const std::string &text) { return percent_encode(text); }

// 5. Service similarity results equal a linear Tanimoto scan.
Outcome similarity_search() {
  Check check;
  std::mt19937_64 rng(4242);
  std::vector<SdfEntry> entries;
  std::vector<std::pair<std::string, std::vector<int>>> scan;
  while (entries.size() < 1000) {
    Molecule mol = parse_smiles(testing::random_smiles(rng));
    char id[32];
    std::snprintf(id, sizeof id, "SYN%05zu", entries.size() + 1);
    scan.emplace_back(id, fingerprint(mol).on_bits());
    SdfEntry entry {std::move(mol), {}};
    entry.properties.set("chembl_id", id);
    entries.push_back(std::move(entry));
  }
  Store store;
  const IngestReport report = store.ingest_sdf(write_sdf(entries));
  if (!check.expect(report.errors.empty() && report.ingested == 1000,
                    "synthetic ingest failed")) {
    return check.result();
  }
  LiveService live(store);
  auto http = live.http();

  std::vector<std::string> queries;
  for (int i = 0; i < 8; ++i) {
    queries.push_back(write_smiles(entries[rng() % entries.size()].molecule));
  }
  for (int i = 0; i < 4; ++i) {
    queries.push_back(canonical_smiles(testing::random_smiles(rng)));
  }
  std::size_t compared = 0;
  std::size_t hits_total = 0;
  for (const std::string &q : queries) {
    const std::vector<int> qbits = fingerprint(parse_smiles(q)).on_bits();
    for (int threshold : {40, 70, 90}) {
      // Linear scan with exact integer threshold comparison.
      struct Hit {
        std::string id;
        std::size_t inter, uni;
      };
      std::vector<Hit> expected;
      for (const auto &[id, bits] : scan) {
        std::vector<int> common;
        std::set_intersection(qbits.begin(), qbits.end(), bits.begin(), bits.end(),
                              std::back_inserter(common));
        const std::size_t uni = qbits.size() + bits.size() - common.size();
        if (uni > 0 && common.size() * 100 >= threshold * uni) {
          expected.push_back({id, common.size(), uni});
        }
      }
      std::sort(expected.begin(), expected.end(), [](const Hit &a, const Hit &b) {
        const auto lhs = a.inter * b.uni;
        const auto rhs = b.inter * a.uni;
        return lhs != rhs ? lhs > rhs : a.id < b.id;
      });
      std::vector<Json> served;
      std::string path = "/api/data/similarity/" + percent_escape(q) + "/" +
                         std::to_string(threshold) + "?limit=1000";
      while (true) {
        const Json page = get_json(http, path);
        for (const Json &r : page["molecules"]) {
          served.push_back(r);
        }
        if (page["page_meta"]["next"].is_null()) {
          break;
        }
        path = page["page_meta"]["next"].get<std::string>();
      }
      bool same = served.size() == expected.size();
      for (std::size_t i = 0; same && i < served.size(); ++i) {
        const double pct = std::round(10000.0 * expected[i].inter / expected[i].uni) / 100.0;
        same = served[i]["molecule_chembl_id"] == expected[i].id &&
               std::abs(served[i]["similarity"].get<double>() - pct) < 1e-9;
      }
      check.expect(same, "query " + q + " at " + std::to_string(threshold) + ": served " +
                             std::to_string(served.size()) + ", oracle " +
                             std::to_string(expected.size()));
      ++compared;
      hits_total += expected.size();
    }
  }
  check.note(std::to_string(compared) + " query/threshold pairs over 1000 molecules match (" +
             std::to_string(hits_total) + " hits)");
  return check.result();
}

// 6. Descriptor examples.
Outcome descriptors() {
  Check check;
  const auto ethanol = compute_descriptors(parse_smiles("CCO"));
  const auto benzene = compute_descriptors(parse_smiles("c1ccccc1"));
  const auto butane = compute_descriptors(parse_smiles("CCCC"));
  const Molecule naphthalene_mol = parse_smiles("c1ccc2ccccc2c1");
  const auto naphthalene = compute_descriptors(naphthalene_mol);
  check.expect(std::abs(ethanol.molecular_weight - 46.07) <= 0.01, "ethanol MW");
  check.expect(std::abs(benzene.molecular_weight - 78.11) <= 0.01, "benzene MW");
  check.expect(butane.rotatable_bonds == 1, "butane rotatable bonds");
  check.expect(naphthalene.ring_count == 2 &&
                   testing::cycle_rank_by_counting(naphthalene_mol) == 2,
               "naphthalene ring count");
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "ethanol %.3f, benzene %.3f, butane rotb %d, naphthalene rings %d",
                ethanol.molecular_weight, benzene.molecular_weight,
                butane.rotatable_bonds, naphthalene.ring_count);
  check.note(detail);
  return check.result();
}

Fingerprint mask_fp(unsigned mask, int nbits) {
  Fingerprint fp(nbits);
  for (int j = 0; j < nbits; ++j) {
    if ((mask >> j) & 1u) {
      fp.set(j);
    }
  }
  return fp;
}

// 7. Naive Bayes posteriors against a direct Bayes-rule oracle, and an exact
// model file round trip.
Outcome naive_bayes(const Store &store) {
  Check check;
  std::mt19937_64 rng(7);
  int instances = 0;
  long queries = 0;
  double worst = 0;
  for (int n_classes = 1; n_classes <= 3; ++n_classes) {
    for (int nbits : {1, 2, 4, 8}) {
      for (int n_docs = n_classes; n_docs <= 6; ++n_docs) {
        for (int rep = 0; rep < 3; ++rep) {
          std::vector<std::string> classes;
          for (int c = 0; c < n_classes; ++c) {
            classes.push_back("T" + std::to_string(c));
          }
          std::vector<std::pair<std::string, unsigned>> docs;
          TrainingSet set;
          for (int d = 0; d < n_docs; ++d) {
            const int c = d < n_classes ? d : static_cast<int>(rng() % n_classes);
            const unsigned mask = static_cast<unsigned>(rng() & ((1u << nbits) - 1));
            docs.emplace_back(classes[c], mask);
            set.examples.push_back({"D" + std::to_string(d), classes[c], mask_fp(mask, nbits)});
          }
          const NBModel model = train(set);
          ++instances;
          for (unsigned q = 0; q < (1u << nbits); ++q) {
            const auto oracle = testing::naive_bayes_oracle(classes, docs, nbits, 1.0, q);
            const auto preds = predict(model, mask_fp(q, nbits), n_classes);
            for (const Prediction &p : preds) {
              const auto at = std::find(classes.begin(), classes.end(), p.target) - classes.begin();
              worst = std::max(worst, std::abs(p.probability - oracle[at]));
            }
            ++queries;
          }
        }
      }
    }
  }
  check.expect(worst <= 1e-9, "max posterior error " + std::to_string(worst));

  const NBModel model = train(build_training_set(*store.snapshot(), 1));
  const fs::path dir = scratch_dir("model");
  save_model(model, dir / "model.nb");
  const NBModel loaded = load_model(dir / "model.nb");
  fs::remove_all(dir);
  check.expect(loaded == model, "loaded model differs");
  int identical = 0;
  for (int i = 0; i < 100; ++i) {
    const Molecule mol = parse_smiles(testing::random_smiles(rng));
    identical += predict(loaded, mol, 100) == predict(model, mol, 100);
  }
  check.expect(identical == 100, std::to_string(identical) + "/100 identical predictions");
  char detail[200];
  std::snprintf(detail, sizeof detail,
                "%d instances, %ld queries, max error %.2e; round trip 100/100 bit-identical",
                instances, queries, worst);
  check.note(detail);
  return check.result();
}

// 8. Format equivalence, page traversal, CORS and JSONP over HTTP.
Outcome service_contract(const Store &store, const LiveService &live) {
  Check check;
  auto http = live.http();
  int responses = 0;
  int with_cors = 0;
  auto fetch = [&](const std::string &method, const std::string &path,
                   const std::string &body = "") {
    httplib::Result res = method == "GET"     ? http.Get(path)
                          : method == "POST"  ? http.Post(path, body, "text/plain")
                                              : http.Options(path);
    if (!res) {
      throw TransportError(method + " " + path + " failed");
    }
    ++responses;
    with_cors += res->get_header_value("Access-Control-Allow-Origin") == "*";
    return res;
  };

  const std::string list =
      "/api/data/molecule?max_phase__gte=1&order_by=-molecule_properties.molecular_weight&limit=7";
  const Json as_json = Json::parse(fetch("GET", list)->body);
  const Json as_xml = testing::decode_xml(fetch("GET", list + "&format=xml")->body,
                                          Resource::kMolecule);
  const Json as_yaml = testing::decode_yaml(fetch("GET", list + "&format=yaml")->body);
  check.expect(as_xml == as_json, "xml body differs from json");
  check.expect(as_yaml == as_json, "yaml body differs from json");
  const auto accept_yaml = http.Get(list, {{"Accept", "application/yaml"}});
  check.expect(accept_yaml && testing::decode_yaml(accept_yaml->body) == as_json,
               "Accept-negotiated yaml differs");

  const auto jsonp = fetch("GET", list + "&format=jsonp&callback=chem.cb_1");
  check.expect(jsonp->get_header_value("Content-Type").rfind("application/javascript", 0) == 0,
               "jsonp content type");
  check.expect(jsonp->body.rfind("chem.cb_1(", 0) == 0, "jsonp does not open with callback");
  check.expect(testing::decode_jsonp(jsonp->body, "chem.cb_1") == as_json,
               "jsonp payload differs");
  check.expect(fetch("GET", list + "&format=jsonp&callback=alert(1)")->status == 400,
               "invalid callback accepted");

  // Forward then backward traversal must each see every match exactly once.
  Query q;
  q.resource = Resource::kMolecule;
  q.filters.push_back({"max_phase", FilterOp::kGte, 1});
  q.limit = kMaxLimit;
  std::vector<std::string> truth;
  for (const Json &r : store.execute_query(q).records) {
    truth.push_back(r["molecule_chembl_id"].get<std::string>());
  }
  std::sort(truth.begin(), truth.end());
  std::vector<std::string> forward;
  std::vector<std::string> backward;
  std::string path = "/api/data/molecule?max_phase__gte=1&limit=3";
  std::string last_page;
  while (true) {
    const Json page = Json::parse(fetch("GET", path)->body);
    for (const Json &r : page["molecules"]) {
      forward.push_back(r["molecule_chembl_id"].get<std::string>());
    }
    check.expect(page["page_meta"]["total_count"] == truth.size(), "total_count mismatch");
    if (page["page_meta"]["next"].is_null()) {
      last_page = path;
      break;
    }
    path = page["page_meta"]["next"].get<std::string>();
  }
  path = last_page;
  while (true) {
    const Json page = Json::parse(fetch("GET", path)->body);
    for (const Json &r : page["molecules"]) {
      backward.push_back(r["molecule_chembl_id"].get<std::string>());
    }
    if (page["page_meta"]["previous"].is_null()) {
      break;
    }
    path = page["page_meta"]["previous"].get<std::string>();
  }
  const std::size_t forward_count = forward.size();
  std::sort(forward.begin(), forward.end());
  std::sort(backward.begin(), backward.end());
  check.expect(forward == truth, "forward traversal visited " +
                                     std::to_string(forward_count) + " records, expected " +
                                     std::to_string(truth.size()));
  check.expect(backward == truth, "backward traversal differs");

  fetch("GET", "/api/data/molecule/CHEMBL90001?format=xml");
  fetch("GET", "/api/data/molecule/NOPE");
  fetch("GET", "/api/data/molecule?colour=red");
  fetch("GET", "/api/data/substructure/c1ccccc1");
  fetch("GET", "/api/data/similarity/c1ccccc1/70?format=yaml");
  fetch("POST", "/api/utils/canonicalizeSmiles", "OCC\n");
  fetch("POST", "/api/utils/descriptors", "C1CC\n");
  fetch("POST", "/api/data/molecule");
  fetch("OPTIONS", "/api/data/molecule");
  check.expect(with_cors == responses, std::to_string(responses - with_cors) +
                                           " responses without Access-Control-Allow-Origin");
  check.note("json/xml/yaml/jsonp agree; traversal " + std::to_string(truth.size()) +
             " records each once both ways; CORS on " + std::to_string(with_cors) + "/" +
             std::to_string(responses) + " responses");
  return check.result();
}

// 9. Request counts of the lazy client with an instrumented transport.
Outcome client_laziness(const LiveService &live) {
  Check check;
  const fs::path cache_dir = scratch_dir("laziness");
  auto transport = std::make_shared<CountingTransport>(std::make_shared<HttpTransport>());
  const Client client(live.origin(), transport, std::make_shared<ResponseCache>(cache_dir));
  const LazyQuery query = client.resource("molecule")
                              .filter("max_phase", FilterOp::kGte, "0")
                              .order_by({"molecule_chembl_id"});
  const std::size_t before = transport->requests();
  const auto cold = query.iterate();
  const std::size_t cold_requests = transport->requests() - before;
  transport->reset();
  const auto warm = query.iterate();
  const std::size_t warm_requests = transport->requests();
  fs::remove_all(cache_dir);
  check.expect(before == 0, std::to_string(before) + " requests before materialization");
  check.expect(cold.size() == 45, "cold iteration returned " + std::to_string(cold.size()));
  check.expect(cold_requests == 3, std::to_string(cold_requests) + " cold requests");
  check.expect(warm_requests == 0, std::to_string(warm_requests) + " warm requests");
  check.expect(warm == cold, "warm records differ");
  check.note("requests: " + std::to_string(before) + " before, " +
             std::to_string(cold_requests) + " cold (45 records), " +
             std::to_string(warm_requests) + " warm");
  return check.result();
}

// 10. Random bytes into both parsers: only structured errors, each input fast.
Outcome fuzz_totality() {
  Check check;
  std::mt19937_64 rng(1009);
  std::vector<std::string> seeds_smiles;
  std::vector<std::string> seeds_ctab;
  for (const auto &[smiles, name] : testing::load_corpus()) {
    seeds_smiles.push_back(smiles);
    seeds_ctab.push_back(write_ctab(parse_smiles(smiles)));
  }
  const std::string alphabet = "CNOSPFIBrcnospl()[]=#@+-123456789%/\\.H* \n";
  auto random_input = [&](const std::vector<std::string> &seeds, int i) {
    std::string s;
    switch (i % 3) {
      case 0: {  // raw bytes
        const std::size_t n = rng() % 200;
        for (std::size_t k = 0; k < n; ++k) {
          s.push_back(static_cast<char>(rng() & 0xff));
        }
        break;
      }
      case 1: {  // SMILES-alphabet noise
        const std::size_t n = rng() % 80;
        for (std::size_t k = 0; k < n; ++k) {
          s.push_back(alphabet[rng() % alphabet.size()]);
        }
        break;
      }
      default: {  // byte mutations of a valid input
        s = seeds[rng() % seeds.size()];
        const int edits = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < edits && !s.empty(); ++e) {
          const std::size_t at = rng() % s.size();
          switch (rng() % 3) {
            case 0: s[at] = static_cast<char>(rng() & 0xff); break;
            case 1: s.erase(at, 1); break;
            default: s.insert(at, 1, s[rng() % s.size()]); break;
          }
        }
      }
    }
    return s;
  };

  int valid = 0;
  int structured = 0;
  int other = 0;
  double slowest_ms = 0;
  for (int i = 0; i < 10000; ++i) {
    const bool smiles = i % 2 == 0;
    const std::string input = random_input(smiles ? seeds_smiles : seeds_ctab, i / 2);
    const auto start = Stopwatch::now();
    try {
      const Molecule mol = smiles ? parse_smiles(input) : parse_ctab(input);
      (void)write_smiles(mol);
      ++valid;
    } catch (const Error &) {
      ++structured;
    } catch (const std::exception &e) {
      ++other;
      check.expect(false, std::string("non-structured exception: ") + e.what());
    }
    slowest_ms = std::max(
        slowest_ms,
        std::chrono::duration<double, std::milli>(Stopwatch::now() - start).count());
  }
  check.expect(slowest_ms <= 100.0, "slowest input took " + std::to_string(slowest_ms) + " ms");
  char detail[200];
  std::snprintf(detail, sizeof detail,
                "10000 inputs: %d valid, %d structured errors, %d other; slowest %.2f ms",
                valid, structured, other, slowest_ms);
  check.note(detail);
  return check.result();
}

}  // namespace
}  // namespace chemserve

int main() {
  using namespace chemserve;
  std::unique_ptr<Store> fixture;
  std::unique_ptr<LiveService> live;
  try {
    fixture = testing::load_fixture_store();
    live = std::make_unique<LiveService>(*fixture);
  } catch (const std::exception &e) {
    std::cout << "setup FAIL: " << e.what() << '\n';
    return 1;
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria {
      {"workflow A: approved drugs for a target",
       [&] { return workflow_a(*fixture, *live); }},
      {"workflow B: smiles2ctab then mcs", [&] { return workflow_b(*fixture, *live); }},
      {"canonicalization invariance", canonicalization},
      {"substructure correctness", substructure_correctness},
      {"similarity search", similarity_search},
      {"descriptors", descriptors},
      {"naive Bayes", [&] { return naive_bayes(*fixture); }},
      {"service contract", [&] { return service_contract(*fixture, *live); }},
      {"client laziness", [&] { return client_laziness(*live); }},
      {"fuzz totality", fuzz_totality},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Stopwatch::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception &e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Stopwatch::now() - start).count();
    failures += !outcome.pass;
    std::printf("criterion %zu %s: %s (%s) [%.2fs]\n", i + 1,
                outcome.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
