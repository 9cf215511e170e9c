#include "chemserve/service.h"

#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "chemserve/descriptors.h"
#include "chemserve/mcs.h"
#include "chemserve/molfile.h"
#include "chemserve/smiles.h"
#include "chemserve/wire.h"

namespace chemserve {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

std::string find_header(
    const std::vector<std::pair<std::string, std::string>> &headers,
    std::string_view name) {
  for (const auto &[k, v] : headers) {
    if (iequals(k, name)) {
      return v;
    }
  }
  return {};
}

// Raised inside the handler and rendered as a structured error body.
struct HttpFailure {
  int status;
  std::string kind;
  std::string message;
  Json lines = nullptr;
};

[[noreturn]] void fail(int status, std::string kind, std::string message) {
  throw HttpFailure {status, std::move(kind), std::move(message)};
}

struct Param {
  std::string raw;  // "key=value" as received
  std::string key;
  std::string value;
};

struct Target {
  std::string raw_path;
  std::vector<std::string> segments;  // decoded, without empty ends
  std::vector<Param> params;

  // Last occurrence wins.
  const Param *param(std::string_view key) const {
    for (auto it = params.rbegin(); it != params.rend(); ++it) {
      if (it->key == key) {
        return &*it;
      }
    }
    return nullptr;
  }
};

Target parse_target(std::string_view target) {
  Target out;
  const auto q = target.find('?');
  out.raw_path = std::string(target.substr(0, q));
  std::string_view path = out.raw_path;
  while (!path.empty()) {
    const auto slash = path.find('/');
    const std::string_view seg = path.substr(0, slash);
    if (!seg.empty()) {
      out.segments.push_back(percent_decode(seg));
    }
    if (slash == std::string_view::npos) {
      break;
    }
    path.remove_prefix(slash + 1);
  }
  if (q != std::string_view::npos) {
    std::string_view query = target.substr(q + 1);
    while (!query.empty()) {
      const auto amp = query.find('&');
      const std::string_view piece = query.substr(0, amp);
      if (!piece.empty()) {
        const auto eq = piece.find('=');
        out.params.push_back(
            {std::string(piece), percent_decode(piece.substr(0, eq)),
             eq == std::string_view::npos
                 ? std::string()
                 : percent_decode(piece.substr(eq + 1))});
      }
      if (amp == std::string_view::npos) {
        break;
      }
      query.remove_prefix(amp + 1);
    }
  }
  return out;
}

int parse_window_value(const Param *p, int fallback, const char *name) {
  if (p == nullptr) {
    return fallback;
  }
  const std::string &s = p->value;
  if (s.empty() || s.size() > 9 ||
      s.find_first_not_of("0123456789") != std::string::npos) {
    fail(400, "InvalidParameter",
         std::string(name) + " must be a non-negative integer");
  }
  return std::stoi(s);
}

struct Negotiated {
  WireFormat format = WireFormat::kJson;
  std::string callback;
};

Negotiated negotiate(const Target &t, const HttpRequest &request) {
  Negotiated n;
  if (const Param *f = t.param("format")) {
    const auto parsed = format_from_name(f->value);
    if (!parsed) {
      fail(400, "InvalidParameter", "unsupported format '" + f->value + "'");
    }
    n.format = *parsed;
  } else if (const auto accept = request.header("Accept"); !accept.empty()) {
    n.format = format_from_accept(accept).value_or(WireFormat::kJson);
  }
  if (n.format == WireFormat::kJsonp) {
    const Param *cb = t.param("callback");
    if (cb == nullptr || !valid_callback(cb->value)) {
      fail(400, "InvalidParameter",
           "jsonp requires callback= naming a JavaScript identifier");
    }
    n.callback = cb->value;
  }
  return n;
}

HttpResponse render(const Json &doc, std::string_view root,
                    const Negotiated &n) {
  HttpResponse r;
  r.content_type = std::string(content_type(n.format));
  switch (n.format) {
  case WireFormat::kJson: r.body = to_json_text(doc); break;
  case WireFormat::kJsonp: r.body = to_jsonp_text(doc, n.callback); break;
  case WireFormat::kXml: r.body = to_xml_text(doc, root); break;
  case WireFormat::kYaml: r.body = to_yaml_text(doc); break;
  }
  return r;
}

// Links keep the filters and ordering but not the output format, so every
// format carries the same envelope.
Json page_link(const Target &t, int limit, int offset) {
  std::string link = t.raw_path + "?";
  for (const Param &p : t.params) {
    if (p.key != "limit" && p.key != "offset" && p.key != "format" &&
        p.key != "callback") {
      link += p.raw + "&";
    }
  }
  return link + "limit=" + std::to_string(limit) +
         "&offset=" + std::to_string(offset);
}

Json envelope(const Target &t, std::string_view plural, ResultPage page) {
  Json meta {{"limit", page.limit},
             {"offset", page.offset},
             {"total_count", page.total_count},
             {"next", page.next ? page_link(t, page.next->limit,
                                            page.next->offset)
                                : Json(nullptr)},
             {"previous", page.previous ? page_link(t, page.previous->limit,
                                                    page.previous->offset)
                                        : Json(nullptr)}};
  return Json {{"page_meta", std::move(meta)},
               {std::string(plural), std::move(page.records)}};
}

// Window parameters for endpoints that take no filters.
std::pair<int, int> plain_window(const Target &t) {
  for (const Param &p : t.params) {
    if (p.key != "limit" && p.key != "offset" && p.key != "format" &&
        p.key != "callback") {
      fail(400, "UnknownField", "unsupported parameter '" + p.key + "'");
    }
  }
  const int limit = parse_window_value(t.param("limit"), kDefaultLimit, "limit");
  const int offset = parse_window_value(t.param("offset"), 0, "offset");
  if (limit < 1 || limit > kMaxLimit) {
    fail(400, "InvalidParameter",
         "limit must be between 1 and " + std::to_string(kMaxLimit));
  }
  return {limit, offset};
}

Molecule parse_query_smiles(const std::string &smiles) {
  if (smiles.empty()) {
    fail(400, "InvalidParameter", "empty SMILES");
  }
  try {
    Molecule mol = parse_smiles(smiles);
    if (mol.atom_count() == 0) {
      fail(400, "InvalidParameter", "empty SMILES");
    }
    return mol;
  } catch (const Error &e) {
    fail(400, e.kind(), e.what());
  }
}

HttpResponse handle_list(const Snapshot &snap, Resource resource,
                         const Target &t, const Negotiated &n) {
  Query q;
  q.resource = resource;
  q.limit = parse_window_value(t.param("limit"), kDefaultLimit, "limit");
  q.offset = parse_window_value(t.param("offset"), 0, "offset");
  for (const Param &p : t.params) {
    if (p.key == "limit" || p.key == "offset" || p.key == "format" ||
        p.key == "callback") {
      continue;
    }
    if (p.key == "order_by") {
      std::string_view keys = p.value;
      while (!keys.empty()) {
        const auto comma = keys.find(',');
        if (comma != 0) {
          q.order_by.push_back(parse_sort_key(keys.substr(0, comma)));
        }
        if (comma == std::string_view::npos) {
          break;
        }
        keys.remove_prefix(comma + 1);
      }
      continue;
    }
    FilterClause clause = parse_filter_param(p.key, p.value);
    if (clause.op == FilterOp::kIn) {
      // Split before decoding so an item may carry an encoded comma.
      const auto eq = p.raw.find('=');
      std::string_view raw = eq == std::string::npos
                                 ? std::string_view {}
                                 : std::string_view(p.raw).substr(eq + 1);
      clause.value = Json::array();
      while (true) {
        const auto comma = raw.find(',');
        clause.value.push_back(percent_decode(raw.substr(0, comma)));
        if (comma == std::string_view::npos) {
          break;
        }
        raw.remove_prefix(comma + 1);
      }
    }
    q.filters.push_back(std::move(clause));
  }
  return render(envelope(t, schema(resource).plural, execute_query(snap, q)),
                "response", n);
}

HttpResponse handle_hits(const Snapshot &snap, const Target &t,
                         const Negotiated &n,
                         const std::vector<std::pair<std::string, Json>> &hits) {
  const auto [limit, offset] = plain_window(t);
  std::vector<Json> records;
  records.reserve(hits.size());
  for (const auto &[id, similarity] : hits) {
    const Json *record = snap.table(Resource::kMolecule).find(id);
    if (record == nullptr) {
      continue;
    }
    Json out = *record;
    if (!similarity.is_null()) {
      out["similarity"] = similarity;
    }
    records.push_back(std::move(out));
  }
  return render(envelope(t, schema(Resource::kMolecule).plural,
                         make_page(std::move(records), limit, offset)),
                "response", n);
}

HttpResponse handle_similarity(const Snapshot &snap, const Target &t,
                               const Negotiated &n) {
  // /api/data/similarity/{smiles}/{threshold}
  if (t.segments.size() < 5) {
    fail(404, "NotFound", "expected /api/data/similarity/{smiles}/{threshold}");
  }
  std::string smiles;
  for (std::size_t i = 3; i + 1 < t.segments.size(); ++i) {
    smiles += (i > 3 ? "/" : "") + t.segments[i];
  }
  const std::string &threshold_text = t.segments.back();
  if (threshold_text.empty() || threshold_text.size() > 3 ||
      threshold_text.find_first_not_of("0123456789") != std::string::npos) {
    fail(400, "InvalidParameter", "threshold must be an integer 1-100");
  }
  const int threshold = std::stoi(threshold_text);
  if (threshold < 1 || threshold > 100) {
    fail(400, "InvalidParameter", "threshold must be an integer 1-100");
  }
  const Molecule query = parse_query_smiles(smiles);
  std::vector<std::pair<std::string, Json>> hits;
  for (const SimilarityHit &hit :
       snap.index().similarity_search(query, threshold / 100.0)) {
    hits.emplace_back(hit.id, std::round(hit.score * 10000.0) / 100.0);
  }
  return handle_hits(snap, t, n, hits);
}

HttpResponse handle_substructure(const Snapshot &snap, const Target &t,
                                 const Negotiated &n) {
  if (t.segments.size() < 4) {
    fail(404, "NotFound", "expected /api/data/substructure/{smiles}");
  }
  std::string smiles;
  for (std::size_t i = 3; i < t.segments.size(); ++i) {
    smiles += (i > 3 ? "/" : "") + t.segments[i];
  }
  const Molecule query = parse_query_smiles(smiles);
  std::vector<std::pair<std::string, Json>> hits;
  for (std::string &id : snap.index().substructure_search(query)) {
    hits.emplace_back(std::move(id), nullptr);
  }
  return handle_hits(snap, t, n, hits);
}

struct Line {
  std::size_t number;
  std::string text;
};

std::vector<Line> body_lines(std::string_view body) {
  std::vector<Line> out;
  std::size_t number = 0;
  while (!body.empty()) {
    ++number;
    const auto nl = body.find('\n');
    std::string_view line = body.substr(0, nl);
    body = nl == std::string_view::npos ? std::string_view {}
                                        : body.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.find_first_not_of(" \t") != std::string_view::npos) {
      out.push_back({number, std::string(line)});
    }
  }
  return out;
}

void fail_lines(Json lines) {
  throw HttpFailure {400, "InvalidInput",
                     std::to_string(lines.size()) + " unparseable entries",
                     std::move(lines)};
}

Json line_error(const char *unit, std::size_t where, const Error &e) {
  return Json {{unit, where}, {"kind", e.kind()}, {"message", e.what()}};
}

std::vector<Molecule> smiles_body(std::string_view body) {
  std::vector<Molecule> mols;
  Json errors = Json::array();
  for (const Line &line : body_lines(body)) {
    try {
      mols.push_back(parse_smiles(line.text));
    } catch (const Error &e) {
      errors.push_back(line_error("line", line.number, e));
    }
  }
  if (!errors.empty()) {
    fail_lines(std::move(errors));
  }
  return mols;
}

std::vector<Molecule> sdf_body(std::string_view body) {
  std::vector<Molecule> mols;
  Json errors = Json::array();
  const auto records = split_sdf(body);
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      mols.push_back(parse_sdf_entry(records[i], i).molecule);
    } catch (const Error &e) {
      errors.push_back(line_error("entry", i, e));
    }
  }
  if (!errors.empty()) {
    fail_lines(std::move(errors));
  }
  return mols;
}

HttpResponse text_response(std::string content_type, std::string body) {
  HttpResponse r;
  r.content_type = std::move(content_type);
  r.body = std::move(body);
  return r;
}

HttpResponse handle_utils(const std::string &op, const std::string &body) {
  if (op == "smiles2ctab") {
    std::vector<SdfEntry> entries;
    for (Molecule &mol : smiles_body(body)) {
      entries.push_back({std::move(mol), {}});
    }
    try {
      return text_response("chemical/x-mdl-sdfile", write_sdf(entries));
    } catch (const CapacityError &e) {
      fail(400, e.kind(), e.what());
    }
  }
  if (op == "ctab2smiles") {
    std::string out;
    for (const Molecule &mol : sdf_body(body)) {
      out += write_smiles(mol) + "\n";
    }
    return text_response("text/plain", std::move(out));
  }
  if (op == "canonicalizeSmiles") {
    std::string out;
    for (const Molecule &mol : smiles_body(body)) {
      out += write_smiles(mol) + "\n";
    }
    return text_response("text/plain", std::move(out));
  }
  if (op == "descriptors") {
    Json out = Json::array();
    for (const Molecule &mol : smiles_body(body)) {
      out.push_back(descriptors_to_json(compute_descriptors(mol)));
    }
    return text_response("application/json", out.dump());
  }
  if (op == "mcs") {
    const std::vector<Molecule> mols = sdf_body(body);
    if (mols.empty()) {
      fail(400, "InvalidInput", "mcs needs at least one structure");
    }
    const McsResult result = max_common_substructure(mols);
    HttpResponse r = text_response("text/plain", result.smiles + "\n");
    r.headers.emplace_back("X-MCS-Complete", result.completed ? "true" : "false");
    return r;
  }
  fail(404, "NotFound", "unknown utility '" + op + "'");
}

HttpResponse error_response(const HttpFailure &f) {
  Json err {{"status", f.status}, {"kind", f.kind}, {"message", f.message}};
  if (!f.lines.is_null()) {
    err["lines"] = f.lines;
  }
  HttpResponse r;
  r.status = f.status;
  r.content_type = "application/json";
  r.body = Json {{"error", std::move(err)}}.dump();
  return r;
}

void apply_cors(HttpResponse &r) {
  r.headers.emplace_back("Access-Control-Allow-Origin", "*");
  r.headers.emplace_back("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
  r.headers.emplace_back("Access-Control-Allow-Headers", "Content-Type, Accept");
}

HttpResponse dispatch(const Store &store, const HttpRequest &request) {
  if (request.method == "OPTIONS") {
    HttpResponse r;
    r.status = 204;
    r.headers.emplace_back("Allow", "GET, POST, OPTIONS");
    return r;
  }
  const Target t = parse_target(request.target);
  const auto &seg = t.segments;
  if (seg.size() < 3 || seg[0] != "api" ||
      (seg[1] != "data" && seg[1] != "utils")) {
    fail(404, "NotFound", "no such endpoint");
  }
  if (seg[1] == "utils") {
    if (seg.size() != 3) {
      fail(404, "NotFound", "no such endpoint");
    }
    if (request.method != "POST") {
      fail(405, "MethodNotAllowed", "utilities accept POST");
    }
    return handle_utils(seg[2], request.body);
  }
  if (request.method != "GET") {
    fail(405, "MethodNotAllowed", "data endpoints accept GET");
  }
  const Negotiated n = negotiate(t, request);
  const auto snap = store.snapshot();
  if (seg[2] == "similarity") {
    return handle_similarity(*snap, t, n);
  }
  if (seg[2] == "substructure") {
    return handle_substructure(*snap, t, n);
  }
  const auto resource = resource_from_name(seg[2]);
  if (!resource) {
    fail(404, "NotFound", "unknown resource '" + seg[2] + "'");
  }
  if (seg.size() == 3) {
    return handle_list(*snap, *resource, t, n);
  }
  if (seg.size() == 4) {
    const Json *record = snap->table(*resource).find(seg[3]);
    if (record == nullptr) {
      fail(404, "NotFound", std::string(schema(*resource).name) + " '" +
                                seg[3] + "' not found");
    }
    return render(*record, schema(*resource).name, n);
  }
  fail(404, "NotFound", "no such endpoint");
}

}  // namespace

std::string HttpRequest::header(std::string_view name) const {
  return find_header(headers, name);
}

std::string HttpResponse::header(std::string_view name) const {
  return find_header(headers, name);
}

HttpResponse Service::handle(const HttpRequest &request) const {
  HttpResponse response;
  try {
    response = dispatch(store_, request);
  } catch (const HttpFailure &f) {
    response = error_response(f);
  } catch (const Error &e) {
    response = error_response({400, e.kind(), e.what()});
  } catch (const std::exception &e) {
    response = error_response({500, "InternalError", "internal error"});
  }
  apply_cors(response);
  return response;
}

int port_from_env(int fallback) {
  const char *value = std::getenv("CHEMSERVE_PORT");
  if (value == nullptr || *value == '\0') {
    return fallback;
  }
  const std::string text(value);
  if (text.size() > 5 || text.find_first_not_of("0123456789") != std::string::npos ||
      std::stoi(text) > 65535) {
    throw InvalidParameter("CHEMSERVE_PORT is not a port number: " + text);
  }
  return std::stoi(text);
}

struct HttpServer::Impl {
  explicit Impl(const Service &s) : service(s) { }

  const Service &service;
  httplib::Server server;
  std::thread thread;
  bool bound = false;
};

HttpServer::HttpServer(const Service &service)
    : impl_(std::make_unique<Impl>(service)) {
  const auto handler = [this](const httplib::Request &req,
                              httplib::Response &res) {
    HttpRequest request;
    request.method = req.method;
    request.target = req.target;
    request.body = req.body;
    for (const auto &[k, v] : req.headers) {
      request.headers.emplace_back(k, v);
    }
    const HttpResponse response = impl_->service.handle(request);
    res.status = response.status;
    for (const auto &[k, v] : response.headers) {
      res.set_header(k, v);
    }
    if (response.status != 204) {
      res.set_content(response.body, response.content_type);
    }
  };
  auto &s = impl_->server;
  s.Get(".*", handler);
  s.Post(".*", handler);
  s.Options(".*", handler);
  s.Put(".*", handler);
  s.Delete(".*", handler);
  s.Patch(".*", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string &host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound <= 0) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return bound;
}

void HttpServer::listen() {
  if (!impl_->bound) {
    throw InvalidParameter("bind() must precede listen()");
  }
  impl_->server.listen_after_bind();
}

void HttpServer::start() {
  if (!impl_->bound) {
    throw InvalidParameter("bind() must precede start()");
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) {
    impl_->thread.join();
  }
}

}  // namespace chemserve
