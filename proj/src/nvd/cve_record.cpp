#include "pcve/nvd/cve_record.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "pcve/common/error.hpp"

namespace pcve::nvd {

namespace fs = std::filesystem;

std::string_view to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::Commit: return "Commit";
    case ReferenceKind::Issue: return "Issue";
    case ReferenceKind::Pull: return "Pull";
    case ReferenceKind::OtherGitHub: return "OtherGitHub";
    case ReferenceKind::NonGitHub: return "NonGitHub";
  }
  return "NonGitHub";
}

ReferenceKind reference_kind_from_string(std::string_view text) {
  if (text == "Commit") return ReferenceKind::Commit;
  if (text == "Issue") return ReferenceKind::Issue;
  if (text == "Pull") return ReferenceKind::Pull;
  if (text == "OtherGitHub") return ReferenceKind::OtherGitHub;
  if (text == "NonGitHub") return ReferenceKind::NonGitHub;
  fail(ErrorKind::MalformedRecord, "unknown reference kind '" + std::string(text) + "'");
}

bool is_valid_cve_id(std::string_view id) {
  static const std::regex pattern(R"(CVE-\d{4}-\d{4,})");
  return std::regex_match(id.begin(), id.end(), pattern);
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool all_of_class(std::string_view s, int (*pred)(int)) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [pred](unsigned char c) { return pred(c) != 0; });
}

std::optional<std::string> issue_number(std::string_view s) {
  if (!all_of_class(s, ::isdigit) || s.size() > 18) return std::nullopt;
  auto n = std::stoull(std::string(s));
  if (n == 0) return std::nullopt;
  return std::to_string(n);
}

std::optional<std::string> commit_sha(std::string_view s) {
  if (s.size() < 7 || s.size() > 40 || !all_of_class(s, ::isxdigit)) return std::nullopt;
  return lower(s);
}

enum class HostClass { GitHub, GitHubOther, Foreign };

HostClass classify_host(const std::string& host) {
  if (host == "github.com" || host == "www.github.com") return HostClass::GitHub;
  auto ends_with = [&](std::string_view suffix) {
    return host.size() > suffix.size() && host.compare(host.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".github.com") || host == "githubusercontent.com" || ends_with(".githubusercontent.com")) {
    return HostClass::GitHubOther;
  }
  return HostClass::Foreign;
}

}  // namespace

ReferenceLink classify_reference(std::string_view url) {
  ReferenceLink link;
  link.url = std::string(url);

  std::string_view rest = url;
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front()))) rest.remove_prefix(1);
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.remove_suffix(1);
  if (auto scheme = rest.find("://"); scheme != std::string_view::npos) {
    std::string s = lower(rest.substr(0, scheme));
    if (s != "http" && s != "https") return link;
    rest.remove_prefix(scheme + 3);
  }
  std::size_t host_end = rest.find_first_of("/?#");
  std::string host = lower(rest.substr(0, host_end));
  if (auto at = host.rfind('@'); at != std::string::npos) host.erase(0, at + 1);
  if (auto colon = host.find(':'); colon != std::string::npos) host.erase(colon);
  HostClass host_class = classify_host(host);
  if (host_class == HostClass::Foreign) return link;

  link.kind = ReferenceKind::OtherGitHub;
  if (host_class == HostClass::GitHubOther || host_end == std::string_view::npos) return link;

  std::string_view path = rest.substr(host_end);
  path = path.substr(0, path.find_first_of("?#"));
  std::vector<std::string_view> segments;
  while (!path.empty()) {
    std::size_t slash = path.find('/');
    std::string_view seg = path.substr(0, slash);
    if (!seg.empty()) segments.push_back(seg);
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash + 1);
  }
  if (segments.size() < 2) return link;

  std::string name(segments[1]);
  if (name.size() > 4 && name.compare(name.size() - 4, 4, ".git") == 0) name.resize(name.size() - 4);
  link.repo = std::string(segments[0]) + "/" + name;

  if (segments.size() >= 4) {
    std::string marker = lower(segments[2]);
    if (marker == "commit" || marker == "commits") {
      if (auto sha = commit_sha(segments[3])) {
        link.kind = ReferenceKind::Commit;
        link.locator = *sha;
        return link;
      }
    } else if (marker == "issues") {
      if (auto n = issue_number(segments[3])) {
        link.kind = ReferenceKind::Issue;
        link.locator = *n;
        return link;
      }
    } else if (marker == "pull") {
      if (auto n = issue_number(segments[3])) {
        link.kind = ReferenceKind::Pull;
        link.locator = *n;
        return link;
      }
    }
  }
  if (segments.size() > 2) {
    std::string residual;
    for (std::size_t i = 2; i < segments.size(); ++i) {
      if (!residual.empty()) residual += '/';
      residual += segments[i];
    }
    link.locator = residual;
  }
  return link;
}

namespace {

const Json* find(const Json& obj, std::string_view key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

std::string required_string(const Json& obj, std::string_view key, std::string_view context) {
  const Json* value = find(obj, key);
  if (value == nullptr || value->is_null()) {
    fail(ErrorKind::MissingField, std::string(context) + " lacks '" + std::string(key) + "'");
  }
  if (!value->is_string()) {
    fail(ErrorKind::MalformedRecord, std::string(context) + " field '" + std::string(key) + "' is not a string");
  }
  return value->get<std::string>();
}

std::string pick_english(const Json* list, std::string_view text_key) {
  if (list == nullptr || !list->is_array()) return {};
  std::string fallback;
  for (const auto& item : *list) {
    const Json* value = find(item, text_key);
    if (value == nullptr || !value->is_string()) continue;
    const Json* lang = find(item, "lang");
    if (lang != nullptr && lang->is_string() && lang->get<std::string>() == "en") return value->get<std::string>();
    if (fallback.empty()) fallback = value->get<std::string>();
  }
  return fallback;
}

void add_cwe(std::vector<std::string>& out, const Json& value) {
  static const std::regex cwe(R"(CWE-\d+)");
  if (!value.is_string()) return;
  const std::string text = value.get<std::string>();
  if (!std::regex_match(text, cwe)) return;  // NVD-CWE-Other / NVD-CWE-noinfo
  if (std::find(out.begin(), out.end(), text) == out.end()) out.push_back(text);
}

Timestamp parse_published(const std::string& raw, const std::string& id) {
  try {
    return Timestamp::parse(raw);
  } catch (const Error&) {
    fail(ErrorKind::MalformedRecord, id + ": unparseable published date '" + raw + "'");
  }
}

void check_id(const std::string& id) {
  if (!is_valid_cve_id(id)) fail(ErrorKind::MalformedRecord, "invalid CVE id '" + id + "'");
}

CveRecord parse_v2(const Json& cve) {
  CveRecord record;
  record.cve_id = required_string(cve, "id", "cve entry");
  check_id(record.cve_id);
  record.disclosed_at = parse_published(required_string(cve, "published", record.cve_id), record.cve_id);
  record.description = pick_english(find(cve, "descriptions"), "value");
  if (const Json* weaknesses = find(cve, "weaknesses"); weaknesses != nullptr && weaknesses->is_array()) {
    for (const auto& weakness : *weaknesses) {
      const Json* desc = find(weakness, "description");
      if (desc == nullptr || !desc->is_array()) continue;
      for (const auto& d : *desc) {
        if (const Json* v = find(d, "value")) add_cwe(record.cwe_ids, *v);
      }
    }
  }
  if (const Json* refs = find(cve, "references"); refs != nullptr) {
    if (!refs->is_array()) fail(ErrorKind::MalformedRecord, record.cve_id + ": references is not an array");
    for (const auto& ref : *refs) {
      const Json* url = find(ref, "url");
      if (url == nullptr || !url->is_string()) fail(ErrorKind::MalformedRecord, record.cve_id + ": reference without url");
      record.references.push_back(classify_reference(url->get<std::string>()));
    }
  }
  return record;
}

CveRecord parse_v11(const Json& item) {
  const Json& cve = item.at("cve");
  CveRecord record;
  const Json* meta = find(cve, "CVE_data_meta");
  record.cve_id = required_string(*meta, "ID", "CVE_data_meta");
  check_id(record.cve_id);
  record.disclosed_at = parse_published(required_string(item, "publishedDate", record.cve_id), record.cve_id);
  if (const Json* desc = find(cve, "description")) record.description = pick_english(find(*desc, "description_data"), "value");
  if (const Json* problem = find(cve, "problemtype")) {
    if (const Json* data = find(*problem, "problemtype_data"); data != nullptr && data->is_array()) {
      for (const auto& entry : *data) {
        const Json* desc = find(entry, "description");
        if (desc == nullptr || !desc->is_array()) continue;
        for (const auto& d : *desc) {
          if (const Json* v = find(d, "value")) add_cwe(record.cwe_ids, *v);
        }
      }
    }
  }
  if (const Json* refs = find(cve, "references")) {
    const Json* data = find(*refs, "reference_data");
    if (data != nullptr && data->is_array()) {
      for (const auto& ref : *data) {
        const Json* url = find(ref, "url");
        if (url == nullptr || !url->is_string()) fail(ErrorKind::MalformedRecord, record.cve_id + ": reference without url");
        record.references.push_back(classify_reference(url->get<std::string>()));
      }
    }
  }
  return record;
}

}  // namespace

CveRecord parse_cve(const Json& entry) {
  if (!entry.is_object()) fail(ErrorKind::MalformedRecord, "feed entry is not an object");
  const Json* cve = find(entry, "cve");
  if (cve != nullptr) {
    if (!cve->is_object()) fail(ErrorKind::MalformedRecord, "'cve' is not an object");
    if (find(*cve, "CVE_data_meta") != nullptr) return parse_v11(entry);
    return parse_v2(*cve);
  }
  return parse_v2(entry);
}

bool has_github_artifact_reference(const CveRecord& record) {
  return std::any_of(record.references.begin(), record.references.end(),
                     [](const ReferenceLink& r) { return r.is_artifact(); });
}

std::vector<CveRecord> filter_github_referenced(std::span<const CveRecord> records) {
  std::vector<CveRecord> out;
  for (const auto& r : records) {
    if (has_github_artifact_reference(r)) out.push_back(r);
  }
  return out;
}

namespace {
const Json& feed_items(const Json& document);
}

std::vector<CveRecord> parse_feed_document(const Json& document) {
  const Json& items = feed_items(document);
  std::vector<CveRecord> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(parse_cve(item));
  return out;
}

namespace {

std::vector<fs::path> feed_files(const fs::path& path) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      const std::string name = entry.path().filename().string();
      auto ends_with = [&](std::string_view s) {
        return name.size() >= s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0;
      };
      if (entry.is_regular_file() && (ends_with(".json") || ends_with(".json.gz"))) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    if (!fs::exists(path)) fail(ErrorKind::Io, "feed not found: " + path.string());
    files.push_back(path);
  }
  return files;
}

const Json& feed_items(const Json& document) {
  const Json* items = find(document, "vulnerabilities");
  if (items == nullptr) items = find(document, "CVE_Items");
  if (items == nullptr || !items->is_array()) {
    fail(ErrorKind::MalformedRecord, "feed has neither 'vulnerabilities' nor 'CVE_Items'");
  }
  return *items;
}

}  // namespace

std::vector<CveRecord> load_feed(const fs::path& path) {
  std::vector<CveRecord> out;
  for (const auto& file : feed_files(path)) {
    auto part = parse_feed_document(parse_json(read_file(file), file.string()));
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

FeedLoad load_feed_lenient(const fs::path& path) {
  FeedLoad out;
  for (const auto& file : feed_files(path)) {
    const Json doc = parse_json(read_file(file), file.string());
    std::size_t index = 0;
    for (const auto& item : feed_items(doc)) {
      try {
        out.records.push_back(parse_cve(item));
      } catch (const Error& e) {
        out.rejected.push_back(file.filename().string() + "[" + std::to_string(index) + "]: " + e.what());
      }
      ++index;
    }
  }
  return out;
}

namespace {

Json optional_string(const std::optional<std::string>& value) { return value ? Json(*value) : Json(nullptr); }

std::optional<std::string> read_optional(const Json& row, const char* key) {
  const Json* v = find(row, key);
  if (v == nullptr || v->is_null()) return std::nullopt;
  return v->get<std::string>();
}

}  // namespace

Json to_json(const CveRecord& record) {
  Json refs = Json::array();
  for (const auto& r : record.references) {
    refs.push_back(Json{{"url", r.url},
                        {"kind", std::string(to_string(r.kind))},
                        {"repo", optional_string(r.repo)},
                        {"locator", optional_string(r.locator)}});
  }
  return Json{{"cve_id", record.cve_id},
              {"disclosed_at", record.disclosed_at.iso8601()},
              {"description", record.description},
              {"cwe_ids", record.cwe_ids},
              {"references", std::move(refs)}};
}

CveRecord cve_record_from_json(const Json& row) {
  try {
    CveRecord record;
    record.cve_id = row.at("cve_id").get<std::string>();
    check_id(record.cve_id);
    record.disclosed_at = Timestamp::parse(row.at("disclosed_at").get<std::string>());
    record.description = row.value("description", std::string{});
    if (const Json* cwes = find(row, "cwe_ids")) record.cwe_ids = cwes->get<std::vector<std::string>>();
    if (const Json* refs = find(row, "references")) {
      for (const auto& r : *refs) {
        ReferenceLink link;
        link.url = r.at("url").get<std::string>();
        link.kind = reference_kind_from_string(r.at("kind").get<std::string>());
        link.repo = read_optional(r, "repo");
        link.locator = read_optional(r, "locator");
        record.references.push_back(std::move(link));
      }
    }
    return record;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedRecord, std::string("CveRecord row: ") + e.what());
  }
}

}  // namespace pcve::nvd
