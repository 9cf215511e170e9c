#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include <httplib.h>

#include "chemserve/descriptors.h"
#include "chemserve/fingerprint.h"
#include "chemserve/molfile.h"
#include "chemserve/service.h"
#include "chemserve/smiles.h"
#include "chemserve/substructure.h"
#include "chemserve/wire.h"
#include "fixture.h"
#include "oracles.h"
#include "wire_decode.h"

namespace chemserve {
namespace {

class ServiceTest : public ::testing::Test {
protected:
  static void SetUpTestSuite() { store_ = testing::load_fixture_store().release(); }
  static void TearDownTestSuite() {
    delete store_;
    store_ = nullptr;
  }

  HttpResponse get(const std::string &target,
                   std::vector<std::pair<std::string, std::string>> headers =
                       {}) const {
    HttpRequest r;
    r.target = target;
    r.headers = std::move(headers);
    return Service(*store_).handle(r);
  }

  HttpResponse post(const std::string &target, const std::string &body) const {
    HttpRequest r;
    r.method = "POST";
    r.target = target;
    r.body = body;
    return Service(*store_).handle(r);
  }

  static Json json_of(const HttpResponse &r) { return Json::parse(r.body); }

  static std::vector<std::string> ids(const Json &envelope,
                                      const std::string &plural,
                                      const std::string &key) {
    std::vector<std::string> out;
    for (const Json &rec : envelope.at(plural)) {
      const Json &k = rec.at(key);
      out.push_back(k.is_string() ? k.get<std::string>() : k.dump());
    }
    return out;
  }

  static Store *store_;
};

Store *ServiceTest::store_ = nullptr;

TEST_F(ServiceTest, MechanismsForTarget) {
  const auto r = get("/api/data/mechanism?target_chembl_id=CHEMBL1824");
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(r.content_type, "application/json");
  const Json body = json_of(r);
  EXPECT_EQ(body["page_meta"]["total_count"], 5);
  EXPECT_EQ(body["mechanisms"].size(), 5u);
}

TEST_F(ServiceTest, ApprovedDrugs) {
  const auto r = get(
      "/api/data/molecule?max_phase=4&molecule_chembl_id__in=CHEMBL90001,"
      "CHEMBL90002,CHEMBL90003,CHEMBL90004,CHEMBL90005");
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(ids(json_of(r), "molecules", "molecule_chembl_id"),
            std::vector<std::string>(testing::kApprovedCompounds.begin(),
                                     testing::kApprovedCompounds.end()));
}

TEST_F(ServiceTest, PageMetaLinks) {
  const Json last = json_of(get("/api/data/molecule?limit=20&offset=40"));
  EXPECT_EQ(last["molecules"].size(), 5u);
  EXPECT_TRUE(last["page_meta"]["next"].is_null());
  EXPECT_EQ(last["page_meta"]["previous"], "/api/data/molecule?limit=20&offset=20");
  const Json first = json_of(get("/api/data/molecule"));
  EXPECT_EQ(first["page_meta"]["limit"], 20);
  EXPECT_EQ(first["page_meta"]["offset"], 0);
  EXPECT_EQ(first["page_meta"]["total_count"], 45);
  EXPECT_TRUE(first["page_meta"]["previous"].is_null());
  EXPECT_EQ(first["page_meta"]["next"], "/api/data/molecule?limit=20&offset=20");
}

TEST_F(ServiceTest, FollowingNextEnumeratesEveryMatchOnce) {
  for (const std::string start :
       {"/api/data/molecule?limit=7&order_by=-molecule_properties.molecular_weight",
        "/api/data/molecule?molecule_properties.heavy_atom_count__gte=6&limit=4",
        "/api/data/activity?format=yaml&limit=3"}) {
    std::vector<std::string> seen;
    std::string link = start;
    std::size_t total = 0;
    int requests = 0;
    while (true) {
      const auto r = get(link);
      ASSERT_EQ(r.status, 200) << r.body;
      const bool yaml = link.find("format=yaml") != std::string::npos;
      const Json body = yaml ? testing::decode_yaml(r.body) : json_of(r);
      total = body["page_meta"]["total_count"];
      const bool molecules = body.contains("molecules");
      const auto page = ids(body, molecules ? "molecules" : "activities",
                            molecules ? "molecule_chembl_id" : "activity_id");
      seen.insert(seen.end(), page.begin(), page.end());
      ++requests;
      if (body["page_meta"]["next"].is_null()) {
        break;
      }
      link = body["page_meta"]["next"];
      EXPECT_EQ(link.find("format="), std::string::npos);
      if (start.find("format=yaml") != std::string::npos) {
        link += "&format=yaml";
      }
    }
    EXPECT_EQ(seen.size(), total) << start;
    EXPECT_EQ(std::set<std::string>(seen.begin(), seen.end()).size(), total);
    EXPECT_GT(requests, 1);
    // Traversal order equals the single-page order.
    const auto whole = get(start + "&limit=1000");
    const bool yaml = start.find("format=yaml") != std::string::npos;
    const Json body = yaml ? testing::decode_yaml(whole.body) : json_of(whole);
    const bool molecules = body.contains("molecules");
    EXPECT_EQ(ids(body, molecules ? "molecules" : "activities",
                  molecules ? "molecule_chembl_id" : "activity_id"),
              seen);
  }
}

TEST_F(ServiceTest, FormatsCarryIdenticalData) {
  for (const std::string base :
       {"/api/data/molecule?order_by=pref_name&limit=15&offset=5",
        "/api/data/activity?order_by=-standard_value",
        "/api/data/target", "/api/data/mechanism?action_type__isnull=true",
        "/api/data/similarity/Nc1ccccc1/30"}) {
    const auto sep = base.find('?') == std::string::npos ? "?" : "&";
    const Resource resource =
        base.find("activity") != std::string::npos   ? Resource::kActivity
        : base.find("target") != std::string::npos   ? Resource::kTarget
        : base.find("mechanism") != std::string::npos ? Resource::kMechanism
                                                      : Resource::kMolecule;
    const auto json = get(base + sep + "format=json");
    const auto xml = get(base + sep + "format=xml");
    const auto yaml = get(base + sep + "format=yaml");
    ASSERT_EQ(json.status, 200) << json.body;
    EXPECT_EQ(xml.content_type, "application/xml");
    EXPECT_EQ(yaml.content_type, "application/yaml");
    Json expected = json_of(json);
    EXPECT_EQ(testing::decode_xml(xml.body, resource), expected) << base;
    EXPECT_EQ(testing::decode_yaml(yaml.body), expected) << base;
  }
}

TEST_F(ServiceTest, AcceptHeaderAndQueryParameterPrecedence) {
  const auto xml = get("/api/data/target", {{"Accept", "application/xml"}});
  EXPECT_EQ(xml.content_type, "application/xml");
  EXPECT_EQ(xml.body.find("<?xml"), 0u);
  const auto json = get("/api/data/target?format=json",
                        {{"accept", "application/yaml"}});
  EXPECT_EQ(json.content_type, "application/json");
  const auto fallback = get("/api/data/target", {{"Accept", "image/png"}});
  EXPECT_EQ(fallback.content_type, "application/json");
  EXPECT_EQ(get("/api/data/target?format=csv").status, 400);
}

TEST_F(ServiceTest, Jsonp) {
  const auto r = get("/api/data/target?format=jsonp&callback=handle_1");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.content_type, "application/javascript");
  EXPECT_EQ(testing::decode_jsonp(r.body, "handle_1"),
            json_of(get("/api/data/target")));
  EXPECT_EQ(get("/api/data/target?format=jsonp").status, 400);
  EXPECT_EQ(get("/api/data/target?format=jsonp&callback=alert(1)").status, 400);
  EXPECT_EQ(get("/api/data/target?format=jsonp&callback=a.b.c").status, 200);
  EXPECT_EQ(get("/api/data/target?format=jsonp&callback=1abc").status, 400);
}

TEST_F(ServiceTest, Detail) {
  const auto r = get("/api/data/molecule/CHEMBL90001");
  ASSERT_EQ(r.status, 200);
  const Json json = json_of(r);
  EXPECT_EQ(json["molecule_chembl_id"], "CHEMBL90001");
  EXPECT_EQ(testing::decode_yaml(get("/api/data/molecule/CHEMBL90001?format=yaml").body),
            json);
  EXPECT_EQ(testing::decode_xml(get("/api/data/molecule/CHEMBL90001?format=xml").body,
                                Resource::kMolecule),
            json);
  EXPECT_EQ(json_of(get("/api/data/activity/1004"))["standard_value"], nullptr);
  const auto missing = get("/api/data/molecule/CHEMBL0");
  EXPECT_EQ(missing.status, 404);
  EXPECT_EQ(json_of(missing)["error"]["kind"], "NotFound");
}

TEST_F(ServiceTest, ListErrorsAreStructured) {
  const std::vector<std::pair<std::string, std::string>> cases {
      {"/api/data/molecule?colour=red", "UnknownField"},
      {"/api/data/molecule?max_phase__near=4", "UnknownOperator"},
      {"/api/data/molecule?max_phase=four", "TypeMismatch"},
      {"/api/data/molecule?order_by=colour", "UnknownField"},
      {"/api/data/molecule?limit=0", "InvalidParameter"},
      {"/api/data/molecule?limit=1001", "InvalidParameter"},
      {"/api/data/molecule?limit=abc", "InvalidParameter"},
      {"/api/data/molecule?offset=-1", "InvalidParameter"},
  };
  for (const auto &[target, kind] : cases) {
    const auto r = get(target);
    EXPECT_EQ(r.status, 400) << target;
    EXPECT_EQ(r.content_type, "application/json");
    const Json body = json_of(r);
    EXPECT_EQ(body["error"]["kind"], kind) << target;
    EXPECT_EQ(body["error"]["status"], 400);
    EXPECT_TRUE(body["error"]["message"].is_string());
  }
  EXPECT_EQ(get("/api/data/compound").status, 404);
  EXPECT_EQ(get("/api/other").status, 404);
  EXPECT_EQ(get("/").status, 404);
}

TEST_F(ServiceTest, SimilarityIdentity) {
  const auto snap = store_->snapshot();
  const Json *rec = snap->table(Resource::kMolecule).find("CHEMBL90002");
  const std::string smiles = (*rec)["molecule_structures"]["canonical_smiles"];
  const auto r =
      get("/api/data/similarity/" + percent_encode(smiles) + "/100");
  ASSERT_EQ(r.status, 200) << r.body;
  const Json body = json_of(r);
  ASSERT_GE(body["molecules"].size(), 1u);
  EXPECT_EQ(body["molecules"][0]["molecule_chembl_id"], "CHEMBL90002");
  EXPECT_EQ(body["molecules"][0]["similarity"], 100.0);
}

TEST_F(ServiceTest, SimilarityBounds) {
  EXPECT_EQ(get("/api/data/similarity/CCO/101").status, 400);
  EXPECT_EQ(get("/api/data/similarity/CCO/0").status, 400);
  EXPECT_EQ(get("/api/data/similarity/CCO/abc").status, 400);
  EXPECT_EQ(get("/api/data/similarity/CCO/50.5").status, 400);
  EXPECT_EQ(get("/api/data/similarity/C1CC/50").status, 400);
  EXPECT_EQ(get("/api/data/similarity/CCO").status, 404);
  EXPECT_EQ(get("/api/data/similarity/CCO/1").status, 200);
}

TEST_F(ServiceTest, SimilarityMatchesLinearScan) {
  const std::string query = "Nc1ccc(O)cc1C";
  const auto r = get("/api/data/similarity/" + percent_encode(query) +
                     "/40?limit=1000");
  ASSERT_EQ(r.status, 200) << r.body;
  const Json body = json_of(r);

  const Fingerprint qfp = fingerprint(parse_smiles(query));
  std::vector<std::pair<double, std::string>> expected;
  for (const Json &rec :
       store_->snapshot()->table(Resource::kMolecule).records()) {
    const Fingerprint fp = fingerprint(
        parse_smiles(rec["molecule_structures"]["canonical_smiles"].get<std::string>()));
    const auto inter = [&] {
      int n = 0;
      for (int b : qfp.on_bits()) {
        n += fp.test(b);
      }
      return n;
    }();
    const int uni = static_cast<int>(qfp.on_bits().size() +
                                     fp.on_bits().size()) - inter;
    const double t = uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
    if (t >= 0.4) {
      expected.emplace_back(t, rec["molecule_chembl_id"]);
    }
  }
  std::sort(expected.begin(), expected.end(), [](const auto &a, const auto &b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  ASSERT_FALSE(expected.empty());
  ASSERT_EQ(body["molecules"].size(), expected.size());
  EXPECT_EQ(body["page_meta"]["total_count"], expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(body["molecules"][i]["molecule_chembl_id"], expected[i].second);
    EXPECT_NEAR(body["molecules"][i]["similarity"].get<double>(),
                expected[i].first * 100.0, 0.005 + 1e-9);
  }
}

TEST_F(ServiceTest, Substructure) {
  Query q;
  q.filters = {{"pref_name", FilterOp::kExact, "TOLUENE"}};
  const auto toluene = store_->execute_query(q);
  ASSERT_EQ(toluene.total_count, 1u);
  const std::string toluene_id = toluene.records[0]["molecule_chembl_id"];

  const Json hits = json_of(get("/api/data/substructure/c1ccccc1?limit=1000"));
  const auto found = ids(hits, "molecules", "molecule_chembl_id");
  EXPECT_NE(std::find(found.begin(), found.end(), toluene_id), found.end());
  // Every hit really contains benzene; every non-hit does not.
  const Molecule benzene = parse_smiles("c1ccccc1");
  for (const Json &rec : store_->snapshot()->table(Resource::kMolecule).records()) {
    const Molecule mol = parse_smiles(
        rec["molecule_structures"]["canonical_smiles"].get<std::string>());
    const bool hit = std::find(found.begin(), found.end(),
                               rec["molecule_chembl_id"]) != found.end();
    EXPECT_EQ(hit, testing::brute_force_embeddings(benzene, mol, 1) > 0);
  }

  const Json none = json_of(get("/api/data/substructure/ClCCl"));
  EXPECT_EQ(none["page_meta"]["total_count"], 0);
  EXPECT_TRUE(none["molecules"].empty());
  EXPECT_EQ(get("/api/data/substructure/C1CC").status, 400);
  EXPECT_EQ(get("/api/data/substructure/").status, 404);
}

TEST_F(ServiceTest, PathSmilesDecodedOnceWithLiteralPlus) {
  // Percent-encoded brackets and a literal '+' in the path.
  const Json encoded = json_of(get("/api/data/substructure/C%5BN+%5D(=O)%5BO-%5D"));
  const Json literal = json_of(get("/api/data/substructure/C[N+](=O)[O-]"));
  const Json escaped = json_of(get("/api/data/substructure/C%5BN%2B%5D(%3DO)%5BO-%5D"));
  EXPECT_EQ(encoded["page_meta"]["total_count"], 1);
  EXPECT_EQ(encoded, literal);
  EXPECT_EQ(encoded, escaped);
  // "%2541" decodes once to "%41", which is not a valid SMILES.
  EXPECT_EQ(get("/api/data/substructure/%2541").status, 400);
}

TEST_F(ServiceTest, UtilsSmiles2Ctab) {
  const auto r = post("/api/utils/smiles2ctab", "CCO\n");
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(r.content_type, "chemical/x-mdl-sdfile");
  const auto entries = parse_sdf(r.body);
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(write_smiles(entries[0].molecule), "CCO");
}

TEST_F(ServiceTest, UtilsCtab2SmilesAndCanonicalize) {
  const std::string sdf = post("/api/utils/smiles2ctab", "OCC\nc1ccccc1C\n").body;
  const auto r = post("/api/utils/ctab2smiles", sdf);
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(r.body, canonical_smiles("CCO") + "\n" + canonical_smiles("Cc1ccccc1") + "\n");
  const auto bare = post("/api/utils/ctab2smiles",
                         write_ctab(parse_smiles("CCN")));
  EXPECT_EQ(bare.body, "CCN\n");
  const auto c = post("/api/utils/canonicalizeSmiles", "OCC\r\n\nCCO\n");
  EXPECT_EQ(c.body, "CCO\nCCO\n");
  EXPECT_EQ(c.content_type, "text/plain");
}

TEST_F(ServiceTest, UtilsDescriptors) {
  const auto r = post("/api/utils/descriptors", "c1ccccc1\n");
  ASSERT_EQ(r.status, 200);
  const Json body = json_of(r);
  ASSERT_EQ(body.size(), 1u);
  EXPECT_NEAR(body[0]["molecular_weight"].get<double>(), 78.11, 0.01);
  EXPECT_EQ(body[0]["ring_count"], 1);
}

TEST_F(ServiceTest, UtilsMcs) {
  const std::string sdf = post("/api/utils/smiles2ctab", "CCO\nCCCO\n").body;
  const auto r = post("/api/utils/mcs", sdf);
  ASSERT_EQ(r.status, 200) << r.body;
  std::string smiles = r.body;
  ASSERT_FALSE(smiles.empty());
  smiles.pop_back();
  const Molecule mcs = parse_smiles(smiles);
  EXPECT_EQ(mcs.atom_count(), 3);
  EXPECT_EQ(mcs.bond_count(), 2);
  EXPECT_EQ(testing::brute_force_mcs({parse_smiles("CCO"), parse_smiles("CCCO")}),
            (std::pair<int, int> {3, 2}));
  EXPECT_TRUE(has_substructure(mcs, parse_smiles("CCO")));
  EXPECT_TRUE(has_substructure(mcs, parse_smiles("CCCO")));
  EXPECT_EQ(r.header("X-MCS-Complete"), "true");
}

TEST_F(ServiceTest, UtilsErrors) {
  const auto r = post("/api/utils/canonicalizeSmiles", "CCO\nC1CC\nCC\nC(\n");
  EXPECT_EQ(r.status, 400);
  const Json body = json_of(r);
  ASSERT_EQ(body["error"]["lines"].size(), 2u);
  EXPECT_EQ(body["error"]["lines"][0]["line"], 2);
  EXPECT_EQ(body["error"]["lines"][1]["line"], 4);
  EXPECT_EQ(body["error"]["lines"][0]["kind"], "SyntaxError");
  EXPECT_EQ(post("/api/utils/ctab2smiles", "garbage\n").status, 400);
  EXPECT_EQ(post("/api/utils/mcs", "").status, 400);
  EXPECT_EQ(post("/api/utils/depict", "CCO").status, 404);
  EXPECT_EQ(get("/api/utils/descriptors").status, 405);
  HttpRequest put;
  put.method = "PUT";
  put.target = "/api/data/molecule";
  EXPECT_EQ(Service(*store_).handle(put).status, 405);
}

TEST_F(ServiceTest, CorsOnEveryResponse) {
  std::vector<HttpResponse> responses {
      get("/api/data/molecule"), get("/api/data/molecule/nope"),
      get("/api/data/molecule?colour=1"), post("/api/utils/descriptors", "CCO"),
      post("/api/utils/descriptors", "C1")};
  HttpRequest options;
  options.method = "OPTIONS";
  options.target = "/api/data/molecule";
  const HttpResponse preflight = Service(*store_).handle(options);
  EXPECT_EQ(preflight.status, 204);
  EXPECT_TRUE(preflight.body.empty());
  responses.push_back(preflight);
  for (const auto &r : responses) {
    EXPECT_EQ(r.header("Access-Control-Allow-Origin"), "*");
    const std::string methods = r.header("Access-Control-Allow-Methods");
    for (const char *m : {"GET", "POST", "OPTIONS"}) {
      EXPECT_NE(methods.find(m), std::string::npos);
    }
  }
}

TEST_F(ServiceTest, ShuffledReplayIsStateless) {
  const std::vector<std::string> log {
      "/api/data/molecule?limit=5", "/api/data/molecule?limit=5&offset=5",
      "/api/data/mechanism?target_chembl_id=CHEMBL1824&format=xml",
      "/api/data/similarity/CCO/20", "/api/data/substructure/c1ccccc1",
      "/api/data/activity?format=yaml&order_by=standard_value",
      "/api/data/molecule/CHEMBL90003", "/api/data/molecule?colour=1"};
  std::vector<std::string> baseline;
  for (const auto &t : log) {
    baseline.push_back(get(t).body);
  }
  std::mt19937_64 rng(3);
  std::vector<std::size_t> order(log.size());
  for (int round = 0; round < 5; ++round) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      EXPECT_EQ(get(log[i]).body, baseline[i]);
    }
  }
}

TEST_F(ServiceTest, OverRealHttp) {
  Service service(*store_);
  HttpServer server(service);
  const int port = server.bind("127.0.0.1", 0);
  server.start();
  httplib::Client client("127.0.0.1", port);
  client.set_url_encode(false);
  auto res = client.Get("/api/data/mechanism?target_chembl_id=CHEMBL1824");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(Json::parse(res->body)["page_meta"]["total_count"], 5);
  auto sim = client.Get("/api/data/similarity/C%5BN+%5D(=O)%5BO-%5D/100");
  ASSERT_TRUE(sim);
  EXPECT_EQ(sim->status, 200) << sim->body;
  auto util = client.Post("/api/utils/descriptors", "CCO\n", "text/plain");
  ASSERT_TRUE(util);
  EXPECT_EQ(util->status, 200);
  EXPECT_NEAR(Json::parse(util->body)[0]["molecular_weight"].get<double>(),
              46.07, 0.01);
  auto pre = client.Options("/api/data/molecule");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_EQ(pre->get_header_value("Access-Control-Allow-Origin"), "*");
  server.stop();
}

TEST(ServiceConfig, PortFromEnvironment) {
  ::unsetenv("CHEMSERVE_PORT");
  EXPECT_EQ(port_from_env(), 8000);
  ::setenv("CHEMSERVE_PORT", "9123", 1);
  EXPECT_EQ(port_from_env(), 9123);
  ::setenv("CHEMSERVE_PORT", "http", 1);
  EXPECT_THROW(port_from_env(), InvalidParameter);
  ::unsetenv("CHEMSERVE_PORT");
}

TEST(Wire, PercentCoding) {
  EXPECT_EQ(percent_decode("a%2Bb+c"), "a+b+c");
  EXPECT_EQ(percent_decode("%zz%4"), "%zz%4");
  EXPECT_EQ(percent_decode("%5bO-%5D"), "[O-]");
  EXPECT_EQ(percent_encode("C[N+](=O)#C"), "C%5BN%2B%5D%28%3DO%29%23C");
  EXPECT_EQ(percent_decode(percent_encode("x y/%+")), "x y/%+");
}

TEST(Wire, XmlEscaping) {
  const std::string xml = to_xml_text(Json {{"a", "<&>\"'"}}, "response");
  EXPECT_NE(xml.find("<a>&lt;&amp;&gt;&quot;&apos;</a>"), std::string::npos);
}

}  // namespace
}  // namespace chemserve
