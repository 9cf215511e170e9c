#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "chemserve/query.h"
#include "chemserve/records.h"

namespace chemserve {

struct TransportResponse {
  int status = 0;
  std::string body;
};

class Transport {
public:
  virtual ~Transport() = default;
  // `url` is absolute ("http://host:port/path?query"), already encoded.
  // Throws TransportError when no response arrives.
  virtual TransportResponse get(const std::string &url) = 0;
};

class HttpTransport : public Transport {
public:
  explicit HttpTransport(std::chrono::milliseconds timeout =
                             std::chrono::seconds(30))
      : timeout_(timeout) { }
  TransportResponse get(const std::string &url) override;

private:
  std::chrono::milliseconds timeout_;
};

// Decorator that counts requests passed to the wrapped transport.
class CountingTransport : public Transport {
public:
  explicit CountingTransport(std::shared_ptr<Transport> inner)
      : inner_(std::move(inner)) { }
  TransportResponse get(const std::string &url) override;

  std::size_t requests() const { return count_; }
  void reset() { count_ = 0; }

private:
  std::shared_ptr<Transport> inner_;
  std::atomic<std::size_t> count_ {0};
};

using Clock = std::function<std::chrono::system_clock::time_point()>;

// Directory of cached response bodies. Each entry is "<hash>.body" plus a
// "<hash>.meta" JSON sidecar holding the full URL and the store time; the
// hash is FNV-1a of the URL.
class ResponseCache {
public:
  explicit ResponseCache(std::filesystem::path dir,
                         Clock clock = std::chrono::system_clock::now);

  // Body stored for `url` less than `ttl` ago.
  std::optional<std::string> lookup(const std::string &url,
                                    std::chrono::seconds ttl) const;
  // Throws IoError.
  void store(const std::string &url, const std::string &body);
  // Removes every entry whose URL starts with `prefix`.
  std::size_t clear(const std::string &prefix);

  const std::filesystem::path &dir() const { return dir_; }

private:
  std::filesystem::path dir_;
  Clock clock_;
  mutable std::mutex mutex_;
};

// CHEMSERVE_CACHE_DIR, else $XDG_CACHE_HOME/chemserve, else
// $HOME/.cache/chemserve, else a directory under the system temp path.
std::filesystem::path default_cache_dir();

inline constexpr int kDefaultPageSize = kDefaultLimit;
inline constexpr std::chrono::seconds kDefaultCacheTtl = std::chrono::hours(24);

struct CachePolicy {
  bool enabled = true;
  std::chrono::seconds ttl = kDefaultCacheTtl;
};

struct ClientFilter {
  std::string field;
  FilterOp op = FilterOp::kExact;
  std::vector<std::string> values;  // one item unless op is `in`
};

class LazyQuery;

// Entry point bound to one service. Copies share transport and cache.
class Client {
public:
  // Null transport means HttpTransport; null cache means a ResponseCache in
  // default_cache_dir().
  explicit Client(std::string base_url,
                  std::shared_ptr<Transport> transport = nullptr,
                  std::shared_ptr<ResponseCache> cache = nullptr);

  // No request is made until the query is materialized.
  LazyQuery resource(std::string name) const;
  // Drops every cached response for this base URL.
  std::size_t clear_cache() const;

  const std::string &base_url() const { return state_->base_url; }

private:
  friend class LazyQuery;
  struct State {
    std::string base_url;
    std::shared_ptr<Transport> transport;
    std::shared_ptr<ResponseCache> cache;
  };
  std::shared_ptr<const State> state_;
};

// Immutable query description. Refinements return new values and perform no
// I/O; iterate/count/at issue requests.
class LazyQuery {
public:
  // For `in`, `value` is a comma-separated list.
  LazyQuery filter(std::string field, FilterOp op, std::string value) const;
  // `in` over several values; items may contain commas.
  LazyQuery filter_in(std::string field,
                      const std::vector<std::string> &values) const;
  // Keys are field paths, "-" prefixed for descending.
  LazyQuery order_by(std::vector<std::string> keys) const;
  // Throws InvalidParameter outside 1..kMaxLimit.
  LazyQuery page_size(int size) const;
  LazyQuery cache_control(bool enabled,
                          std::chrono::seconds ttl = kDefaultCacheTtl) const;

  // Every matching record, fetching pages on demand and following next links.
  // Throws TransportError, ServiceError.
  std::vector<Json> iterate() const;
  // Calls `fn` per page as it arrives; return false to stop early.
  void for_each_page(const std::function<bool(const std::vector<Json> &)> &fn)
      const;
  // total_count from a single limit=1 request.
  std::size_t count() const;
  // Record at position `i`, fetching only the page that contains it.
  // Throws InvalidParameter when out of range.
  Json at(std::size_t i) const;

  // Path and query of the first page ("/api/data/x?...&limit=&offset=").
  std::string page_path(int limit, int offset) const;

  const std::string &resource() const { return resource_; }
  const std::vector<ClientFilter> &filters() const { return filters_; }
  const std::vector<std::string> &order() const { return order_; }
  int page_size() const { return page_size_; }
  const CachePolicy &cache_policy() const { return cache_; }

private:
  friend class Client;
  LazyQuery(std::shared_ptr<const Client::State> state, std::string resource)
      : state_(std::move(state)), resource_(std::move(resource)) { }

  Json fetch(const std::string &path) const;

  std::shared_ptr<const Client::State> state_;
  std::string resource_;
  std::vector<ClientFilter> filters_;
  std::vector<std::string> order_;
  int page_size_ = kDefaultPageSize;
  CachePolicy cache_;
};

}  // namespace chemserve
