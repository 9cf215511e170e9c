#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "chemserve/store.h"

namespace chemserve {

struct HttpRequest {
  std::string method = "GET";
  std::string target;  // raw path plus optional "?query"
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;

  // Case-insensitive header lookup; empty when absent.
  std::string header(std::string_view name) const;
};

struct HttpResponse {
  int status = 200;
  std::string content_type;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;

  std::string header(std::string_view name) const;
};

// Stateless request handler. Each request reads one store snapshot, so an
// ingest running concurrently is seen entirely or not at all.
//
//   GET  /api/data/{resource}[?field[__op]=v&order_by=-f&limit=&offset=]
//   GET  /api/data/{resource}/{id}
//   GET  /api/data/similarity/{smiles}/{threshold 1-100}
//   GET  /api/data/substructure/{smiles}
//   POST /api/utils/{smiles2ctab|ctab2smiles|descriptors|mcs|
//                    canonicalizeSmiles}
//
// Output format comes from ?format= (json, jsonp, xml, yaml), else the
// Accept header, else json. Errors are JSON objects
// {"error": {"status", "kind", "message"[, "lines"]}}.
class Service {
public:
  explicit Service(const Store &store) : store_(store) { }

  HttpResponse handle(const HttpRequest &request) const;

private:
  const Store &store_;
};

inline constexpr int kDefaultPort = 8000;
// CHEMSERVE_PORT, or `fallback` when unset. Throws InvalidParameter when set
// to something other than a port number.
int port_from_env(int fallback = kDefaultPort);

// HTTP/1.1 front end for a Service.
class HttpServer {
public:
  explicit HttpServer(const Service &service);
  ~HttpServer();
  HttpServer(const HttpServer &) = delete;
  HttpServer &operator=(const HttpServer &) = delete;

  // Binds to `port` (0 picks a free port) and returns the bound port.
  // Throws IoError.
  int bind(const std::string &host, int port);
  // Serves until stop() is called. Requires bind().
  void listen();
  // Serves on a background thread.
  void start();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace chemserve
