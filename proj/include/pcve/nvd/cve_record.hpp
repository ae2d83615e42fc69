#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcve/common/io.hpp"
#include "pcve/common/time.hpp"

namespace pcve::nvd {

enum class ReferenceKind { Commit, Issue, Pull, OtherGitHub, NonGitHub };

std::string_view to_string(ReferenceKind kind);
ReferenceKind reference_kind_from_string(std::string_view text);

struct ReferenceLink {
  std::string url;
  ReferenceKind kind = ReferenceKind::NonGitHub;
  std::optional<std::string> repo;     // "owner/name"
  std::optional<std::string> locator;  // commit sha or issue/pull number

  bool is_artifact() const {
    return kind == ReferenceKind::Commit || kind == ReferenceKind::Issue || kind == ReferenceKind::Pull;
  }

  friend bool operator==(const ReferenceLink&, const ReferenceLink&) = default;
};

struct CveRecord {
  std::string cve_id;
  Timestamp disclosed_at;  // NVD "published"
  std::string description;
  std::vector<std::string> cwe_ids;
  std::vector<ReferenceLink> references;

  friend bool operator==(const CveRecord&, const CveRecord&) = default;
};

bool is_valid_cve_id(std::string_view id);

// Total and pure. GitHub locators come from anchored path patterns
// /commit/<hex7-40>, /commits/<hex7-40>, /issues/<int>, /pull/<int>;
// query strings and fragments are ignored.
ReferenceLink classify_reference(std::string_view url);

// Maps one feed entry onto a CveRecord. Accepts a JSON 2.0 entry (either the
// {"cve": {...}} wrapper from "vulnerabilities" or the bare cve object) and a
// legacy 1.1 "CVE_Items" entry.
CveRecord parse_cve(const Json& entry);

// Keeps records with at least one Commit/Issue/Pull reference, in input order.
std::vector<CveRecord> filter_github_referenced(std::span<const CveRecord> records);
bool has_github_artifact_reference(const CveRecord& record);

// A feed file (plain or gzip), or a directory whose *.json / *.json.gz files
// are read in lexicographic order.
std::vector<CveRecord> load_feed(const std::filesystem::path& path);
std::vector<CveRecord> parse_feed_document(const Json& document);

// Like load_feed, but entries that fail to parse are reported instead of
// aborting the whole load.
struct FeedLoad {
  std::vector<CveRecord> records;
  std::vector<std::string> rejected;  // "file: error" per bad entry
};
FeedLoad load_feed_lenient(const std::filesystem::path& path);

Json to_json(const CveRecord& record);
CveRecord cve_record_from_json(const Json& row);

}  // namespace pcve::nvd
