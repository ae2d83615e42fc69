#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace pcve::http {

struct Request {
  std::string method = "GET";
  std::string url;
  std::map<std::string, std::string> headers;
  std::string body;
};

struct Response {
  int status = 0;
  std::map<std::string, std::string> headers;  // keys lower-cased
  std::string body;

  std::optional<std::string> header(std::string_view name) const;
};

class Transport {
public:
  virtual ~Transport() = default;
  // Returns any HTTP status; throws NetworkFailure only when no response
  // could be obtained at all.
  virtual Response send(const Request& request) = 0;
};

class CurlTransport final : public Transport {
public:
  explicit CurlTransport(std::chrono::seconds timeout = std::chrono::seconds(60));
  Response send(const Request& request) override;

private:
  std::chrono::seconds timeout_;
};

// Serves canned responses from a directory for offline runs. A request for
// https://host/a/b?x=1 resolves to <root>/a/b@x=1.json when present, then
// <root>/a/b.json; anything else is a 404. An optional sibling
// "<file>.meta.json" holding {"status": n, "headers": {...}} overrides the
// default 200 response metadata.
class FixtureTransport final : public Transport {
public:
  explicit FixtureTransport(std::filesystem::path root);
  Response send(const Request& request) override;

  static std::string fixture_name(std::string_view path, std::string_view query);

private:
  std::filesystem::path root_;
};

// Counts requests passed to the wrapped transport.
class CountingTransport final : public Transport {
public:
  explicit CountingTransport(std::shared_ptr<Transport> inner) : inner_(std::move(inner)) {}
  Response send(const Request& request) override;
  std::size_t count() const;

private:
  std::shared_ptr<Transport> inner_;
  mutable std::mutex mutex_;
  std::size_t count_ = 0;
};

struct UrlParts {
  std::string scheme;
  std::string host;
  std::string path;
  std::string query;
};

UrlParts split_url(std::string_view url);

}  // namespace pcve::http
