#include "chemserve/client.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "chemserve/error.h"
#include "chemserve/hash.h"
#include "chemserve/wire.h"

namespace chemserve {
namespace {

namespace fs = std::filesystem;

std::string entry_stem(const std::string &url) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash_bytes(url)));
  return buf;
}

std::optional<std::string> slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomically(const fs::path &path, const std::string &data) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << data;
    if (!out) {
      throw IoError("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw IoError("cannot write " + path.string() + ": " + ec.message());
  }
}

long long to_millis(std::chrono::system_clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             t.time_since_epoch())
      .count();
}

// Splits "http://host:port/path?q" into origin and the rest.
std::pair<std::string, std::string> split_url(const std::string &url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw TransportError("not an absolute URL: " + url);
  }
  const auto path = url.find('/', scheme + 3);
  if (path == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path), url.substr(path)};
}

}  // namespace

TransportResponse HttpTransport::get(const std::string &url) {
  const auto [origin, path] = split_url(url);
  httplib::Client client(origin);
  if (!client.is_valid()) {
    throw TransportError("unsupported URL: " + url);
  }
  client.set_url_encode(false);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  client.set_connection_timeout(seconds.count(), 0);
  client.set_read_timeout(seconds.count(), 0);
  auto res = client.Get(path);
  if (!res) {
    throw TransportError("GET " + url + " failed: " +
                         httplib::to_string(res.error()));
  }
  return {res->status, res->body};
}

TransportResponse CountingTransport::get(const std::string &url) {
  ++count_;
  return inner_->get(url);
}

ResponseCache::ResponseCache(fs::path dir, Clock clock)
    : dir_(std::move(dir)), clock_(std::move(clock)) { }

std::optional<std::string> ResponseCache::lookup(
    const std::string &url, std::chrono::seconds ttl) const {
  std::lock_guard lock(mutex_);
  const std::string stem = entry_stem(url);
  const auto meta_text = slurp(dir_ / (stem + ".meta"));
  if (!meta_text) {
    return std::nullopt;
  }
  const Json meta = Json::parse(*meta_text, nullptr, false);
  if (meta.is_discarded() || meta.value("url", "") != url ||
      !meta.contains("stored_at_ms")) {
    return std::nullopt;
  }
  const long long age =
      to_millis(clock_()) - meta["stored_at_ms"].get<long long>();
  if (age < 0 || age >= std::chrono::duration_cast<std::chrono::milliseconds>(
                            ttl)
                            .count()) {
    return std::nullopt;
  }
  return slurp(dir_ / (stem + ".body"));
}

void ResponseCache::store(const std::string &url, const std::string &body) {
  std::lock_guard lock(mutex_);
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) {
    throw IoError("cannot create cache directory " + dir_.string() + ": " +
                  ec.message());
  }
  const std::string stem = entry_stem(url);
  write_atomically(dir_ / (stem + ".body"), body);
  write_atomically(dir_ / (stem + ".meta"),
                   Json {{"url", url}, {"stored_at_ms", to_millis(clock_())}}
                       .dump());
}

std::size_t ResponseCache::clear(const std::string &prefix) {
  std::lock_guard lock(mutex_);
  std::error_code ec;
  std::size_t removed = 0;
  for (fs::directory_iterator it(dir_, ec), end; !ec && it != end;
       it.increment(ec)) {
    const fs::path &path = it->path();
    if (path.extension() != ".meta") {
      continue;
    }
    const auto text = slurp(path);
    const Json meta = text ? Json::parse(*text, nullptr, false) : Json();
    if (!meta.is_object() || meta.value("url", "").rfind(prefix, 0) != 0) {
      continue;
    }
    fs::path body = path;
    body.replace_extension(".body");
    std::error_code ignored;
    fs::remove(body, ignored);
    fs::remove(path, ignored);
    ++removed;
  }
  return removed;
}

fs::path default_cache_dir() {
  if (const char *dir = std::getenv("CHEMSERVE_CACHE_DIR"); dir && *dir) {
    return dir;
  }
  if (const char *xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) {
    return fs::path(xdg) / "chemserve";
  }
  if (const char *home = std::getenv("HOME"); home && *home) {
    return fs::path(home) / ".cache" / "chemserve";
  }
  return fs::temp_directory_path() / "chemserve-cache";
}

Client::Client(std::string base_url, std::shared_ptr<Transport> transport,
               std::shared_ptr<ResponseCache> cache) {
  while (!base_url.empty() && base_url.back() == '/') {
    base_url.pop_back();
  }
  if (!transport) {
    transport = std::make_shared<HttpTransport>();
  }
  if (!cache) {
    cache = std::make_shared<ResponseCache>(default_cache_dir());
  }
  state_ = std::make_shared<const State>(
      State {std::move(base_url), std::move(transport), std::move(cache)});
}

LazyQuery Client::resource(std::string name) const {
  return LazyQuery(state_, std::move(name));
}

std::size_t Client::clear_cache() const {
  return state_->cache->clear(state_->base_url + "/");
}

LazyQuery LazyQuery::filter(std::string field, FilterOp op,
                            std::string value) const {
  std::vector<std::string> values;
  if (op == FilterOp::kIn) {
    std::string_view rest = value;
    while (true) {
      const auto comma = rest.find(',');
      values.emplace_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) {
        break;
      }
      rest.remove_prefix(comma + 1);
    }
  } else {
    values.push_back(std::move(value));
  }
  LazyQuery next = *this;
  next.filters_.push_back({std::move(field), op, std::move(values)});
  return next;
}

LazyQuery LazyQuery::filter_in(std::string field,
                               const std::vector<std::string> &values) const {
  LazyQuery next = *this;
  next.filters_.push_back({std::move(field), FilterOp::kIn, values});
  return next;
}

LazyQuery LazyQuery::order_by(std::vector<std::string> keys) const {
  LazyQuery next = *this;
  next.order_.insert(next.order_.end(), keys.begin(), keys.end());
  return next;
}

LazyQuery LazyQuery::page_size(int size) const {
  if (size < 1 || size > kMaxLimit) {
    throw InvalidParameter("page size must be between 1 and " +
                           std::to_string(kMaxLimit));
  }
  LazyQuery next = *this;
  next.page_size_ = size;
  return next;
}

LazyQuery LazyQuery::cache_control(bool enabled,
                                   std::chrono::seconds ttl) const {
  LazyQuery next = *this;
  next.cache_ = {enabled, ttl};
  return next;
}

std::string LazyQuery::page_path(int limit, int offset) const {
  std::string path = "/api/data/" + percent_encode(resource_) + "?";
  for (const ClientFilter &f : filters_) {
    path += percent_encode(f.field);
    if (f.op != FilterOp::kExact) {
      path += "__" + std::string(to_string(f.op));
    }
    path += "=";
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      path += (i ? "," : "") + percent_encode(f.values[i]);
    }
    path += "&";
  }
  if (!order_.empty()) {
    path += "order_by=";
    for (std::size_t i = 0; i < order_.size(); ++i) {
      path += (i ? "," : "") + percent_encode(order_[i]);
    }
    path += "&";
  }
  return path + "limit=" + std::to_string(limit) +
         "&offset=" + std::to_string(offset);
}

Json LazyQuery::fetch(const std::string &path) const {
  const std::string url = state_->base_url + path;
  std::optional<std::string> body;
  if (cache_.enabled) {
    body = state_->cache->lookup(url, cache_.ttl);
  }
  if (!body) {
    TransportResponse res = state_->transport->get(url);
    if (res.status >= 400) {
      throw ServiceError(res.status, res.body);
    }
    if (res.status < 200 || res.status >= 300) {
      throw TransportError("unexpected HTTP status " +
                           std::to_string(res.status) + " for " + url);
    }
    if (cache_.enabled) {
      state_->cache->store(url, res.body);
    }
    body = std::move(res.body);
  }
  Json doc = Json::parse(*body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw TransportError("malformed response body from " + url);
  }
  return doc;
}

void LazyQuery::for_each_page(
    const std::function<bool(const std::vector<Json> &)> &fn) const {
  // The service names the record list after the plural resource; take the
  // one array member of the envelope.
  const auto records_of = [](const Json &doc) {
    for (const auto &[key, value] : doc.items()) {
      if (key != "page_meta" && value.is_array()) {
        return value.get<std::vector<Json>>();
      }
    }
    throw TransportError("response has no record list");
  };
  std::string path = page_path(page_size_, 0);
  while (true) {
    const Json doc = fetch(path);
    if (!fn(records_of(doc))) {
      return;
    }
    const Json &next = doc.at("page_meta").at("next");
    if (next.is_null()) {
      return;
    }
    // Links omit the output format; json is the service default.
    path = next.get<std::string>();
  }
}

std::vector<Json> LazyQuery::iterate() const {
  std::vector<Json> out;
  for_each_page([&](const std::vector<Json> &page) {
    out.insert(out.end(), page.begin(), page.end());
    return true;
  });
  return out;
}

std::size_t LazyQuery::count() const {
  return fetch(page_path(1, 0)).at("page_meta").at("total_count").get<std::size_t>();
}

Json LazyQuery::at(std::size_t i) const {
  const int offset = static_cast<int>(i / page_size_) * page_size_;
  const Json doc = fetch(page_path(page_size_, offset));
  for (const auto &[key, value] : doc.items()) {
    if (key != "page_meta" && value.is_array()) {
      const std::size_t local = i - static_cast<std::size_t>(offset);
      if (local >= value.size()) {
        throw InvalidParameter("index " + std::to_string(i) +
                               " out of range (total " +
                               doc["page_meta"]["total_count"].dump() + ")");
      }
      return value[local];
    }
  }
  throw TransportError("response has no record list");
}

}  // namespace chemserve
