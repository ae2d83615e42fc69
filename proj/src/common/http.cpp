#include "pcve/common/http.hpp"

#include <algorithm>
#include <cctype>

#include <curl/curl.h>

#include "pcve/common/error.hpp"
#include "pcve/common/io.hpp"

namespace pcve::http {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

struct CurlGlobal {
  CurlGlobal() { curl_global_init(CURL_GLOBAL_DEFAULT); }
  ~CurlGlobal() { curl_global_cleanup(); }
};

std::size_t on_body(char* data, std::size_t size, std::size_t count, void* user) {
  static_cast<std::string*>(user)->append(data, size * count);
  return size * count;
}

std::size_t on_header(char* data, std::size_t size, std::size_t count, void* user) {
  auto* headers = static_cast<std::map<std::string, std::string>*>(user);
  std::string_view line(data, size * count);
  auto colon = line.find(':');
  if (colon != std::string_view::npos) {
    (*headers)[lower(trim(line.substr(0, colon)))] = trim(line.substr(colon + 1));
  } else if (line.rfind("HTTP/", 0) == 0) {
    headers->clear();  // new response after a redirect or 100-continue
  }
  return size * count;
}

}  // namespace

std::optional<std::string> Response::header(std::string_view name) const {
  auto it = headers.find(lower(std::string(name)));
  if (it == headers.end()) return std::nullopt;
  return it->second;
}

CurlTransport::CurlTransport(std::chrono::seconds timeout) : timeout_(timeout) {
  static CurlGlobal global;
}

Response CurlTransport::send(const Request& request) {
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
  if (!curl) fail(ErrorKind::NetworkFailure, "curl_easy_init failed");
  Response response;
  curl_slist* header_list = nullptr;
  for (const auto& [key, value] : request.headers) {
    header_list = curl_slist_append(header_list, (key + ": " + value).c_str());
  }
  std::unique_ptr<curl_slist, decltype(&curl_slist_free_all)> header_guard(header_list, curl_slist_free_all);

  CURL* h = curl.get();
  curl_easy_setopt(h, CURLOPT_URL, request.url.c_str());
  curl_easy_setopt(h, CURLOPT_HTTPHEADER, header_list);
  curl_easy_setopt(h, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(h, CURLOPT_TIMEOUT, static_cast<long>(timeout_.count()));
  curl_easy_setopt(h, CURLOPT_NOSIGNAL, 1L);
  curl_easy_setopt(h, CURLOPT_USERAGENT, "pcve-toolkit/1.0");
  curl_easy_setopt(h, CURLOPT_WRITEFUNCTION, on_body);
  curl_easy_setopt(h, CURLOPT_WRITEDATA, &response.body);
  curl_easy_setopt(h, CURLOPT_HEADERFUNCTION, on_header);
  curl_easy_setopt(h, CURLOPT_HEADERDATA, &response.headers);
  if (request.method == "POST") {
    curl_easy_setopt(h, CURLOPT_POST, 1L);
    curl_easy_setopt(h, CURLOPT_POSTFIELDS, request.body.c_str());
    curl_easy_setopt(h, CURLOPT_POSTFIELDSIZE, static_cast<long>(request.body.size()));
  } else if (request.method != "GET") {
    curl_easy_setopt(h, CURLOPT_CUSTOMREQUEST, request.method.c_str());
  }
  CURLcode rc = curl_easy_perform(h);
  if (rc != CURLE_OK) {
    fail(ErrorKind::NetworkFailure, request.url + ": " + curl_easy_strerror(rc));
  }
  long status = 0;
  curl_easy_getinfo(h, CURLINFO_RESPONSE_CODE, &status);
  response.status = static_cast<int>(status);
  return response;
}

UrlParts split_url(std::string_view url) {
  UrlParts parts;
  std::string_view rest = url;
  if (auto p = rest.find("://"); p != std::string_view::npos) {
    parts.scheme = std::string(rest.substr(0, p));
    rest.remove_prefix(p + 3);
    auto slash = rest.find('/');
    parts.host = std::string(rest.substr(0, slash));
    rest = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash);
  }
  rest = rest.substr(0, rest.find('#'));
  auto q = rest.find('?');
  parts.path = std::string(rest.substr(0, q));
  if (q != std::string_view::npos) parts.query = std::string(rest.substr(q + 1));
  if (parts.path.empty()) parts.path = "/";
  return parts;
}

FixtureTransport::FixtureTransport(fs::path root) : root_(std::move(root)) {}

std::string FixtureTransport::fixture_name(std::string_view path, std::string_view query) {
  std::string name(path);
  while (!name.empty() && name.front() == '/') name.erase(0, 1);
  if (!query.empty()) {
    name += '@';
    for (char c : query) {
      bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '=' || c == '&' || c == '-' || c == '_' || c == '.';
      name += safe ? c : '_';
    }
  }
  return name + ".json";
}

Response FixtureTransport::send(const Request& request) {
  UrlParts parts = split_url(request.url);
  fs::path candidates[] = {root_ / fixture_name(parts.path, parts.query), root_ / fixture_name(parts.path, "")};
  for (const auto& file : candidates) {
    if (!fs::is_regular_file(file)) continue;
    Response response;
    response.status = 200;
    response.body = read_file(file);
    fs::path meta = file;
    meta += ".meta.json";
    if (fs::is_regular_file(meta)) {
      Json m = parse_json(read_file(meta), meta.string());
      response.status = m.value("status", 200);
      if (m.contains("headers")) {
        for (const auto& [k, v] : m["headers"].items()) response.headers[lower(k)] = v.get<std::string>();
      }
    }
    return response;
  }
  Response missing;
  missing.status = 404;
  missing.body = R"({"message":"Not Found"})";
  return missing;
}

Response CountingTransport::send(const Request& request) {
  {
    std::lock_guard lock(mutex_);
    ++count_;
  }
  return inner_->send(request);
}

std::size_t CountingTransport::count() const {
  std::lock_guard lock(mutex_);
  return count_;
}

}  // namespace pcve::http
