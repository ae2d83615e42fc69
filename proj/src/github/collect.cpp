#include "pcve/github/collect.hpp"

#include <algorithm>
#include <set>

#include "pcve/common/error.hpp"
#include "pcve/common/parallel.hpp"
#include "pcve/github/linking.hpp"

namespace pcve::github {

Artifact fetch_artifact(const nvd::ReferenceLink& ref, ArtifactSource& source) {
  if (!ref.is_artifact() || !ref.repo || !ref.locator) {
    fail(ErrorKind::InvalidArgument, "not a commit/issue/pull reference: " + ref.url);
  }
  switch (ref.kind) {
    case nvd::ReferenceKind::Commit:
      return source.fetch_commit(*ref.repo, *ref.locator);
    case nvd::ReferenceKind::Pull:
      return source.fetch_pull(*ref.repo, std::stoull(*ref.locator));
    case nvd::ReferenceKind::Issue: {
      Issue issue = source.fetch_issue(*ref.repo, std::stoull(*ref.locator));
      if (issue.is_pull_request) return source.fetch_pull(*ref.repo, issue.number);
      return issue;
    }
    default:
      break;
  }
  fail(ErrorKind::InvalidArgument, "unsupported reference kind");
}

std::vector<ShallowCommit> list_repo_commits(const std::string& repo, Timestamp lo, Timestamp hi, ArtifactSource& source) {
  if (hi < lo) fail(ErrorKind::InvalidArgument, "commit window is inverted");
  auto commits = source.list_commits(repo, lo, hi);
  std::erase_if(commits, [&](const ShallowCommit& c) { return c.authored_at < lo || c.authored_at > hi; });
  std::sort(commits.begin(), commits.end(), [](const ShallowCommit& a, const ShallowCommit& b) {
    return a.authored_at != b.authored_at ? a.authored_at < b.authored_at : a.sha < b.sha;
  });
  commits.erase(std::unique(commits.begin(), commits.end(), [](const auto& a, const auto& b) { return a.sha == b.sha; }),
                commits.end());
  return commits;
}

namespace {

class Collector {
public:
  Collector(const nvd::CveRecord& cve, ArtifactSource& source) : source_(source) { out_.cve_id = cve.cve_id; }

  template <typename Fetch>
  void add(const std::string& key, ArtifactOrigin origin, Fetch&& fetch, const std::string& label) {
    if (!seen_.insert(key).second) return;
    try {
      Artifact artifact = fetch();
      std::string actual = artifact_key(artifact);
      seen_.insert(actual);
      out_.artifacts.push_back(LinkedArtifact{origin, std::move(artifact)});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotFound) throw;
      out_.unavailable.push_back(label);
    }
  }

  void add_commit(const std::string& repo, const std::string& sha, ArtifactOrigin origin) {
    add(repo + "@" + sha, origin, [&]() -> Artifact { return source_.fetch_commit(repo, sha); }, repo + "@" + sha);
  }

  void add_issue(const std::string& repo, std::uint64_t number, ArtifactOrigin origin) {
    nvd::ReferenceLink ref;
    ref.kind = nvd::ReferenceKind::Issue;
    ref.repo = repo;
    ref.locator = std::to_string(number);
    add(repo + "#" + std::to_string(number), origin, [&] { return fetch_artifact(ref, source_); }, repo + "#" + std::to_string(number));
  }

  CollectedCve& result() { return out_; }
  ArtifactSource& source() { return source_; }

private:
  ArtifactSource& source_;
  CollectedCve out_;
  std::set<std::string> seen_;
};

}  // namespace

CollectedCve collect_cve(const nvd::CveRecord& cve, ArtifactSource& source, const CollectOptions& options) {
  Collector collector(cve, source);
  for (const auto& ref : cve.references) {
    if (!ref.is_artifact() || !ref.repo || !ref.locator) continue;
    std::string key = *ref.repo + (ref.kind == nvd::ReferenceKind::Commit ? "@" : "#") + *ref.locator;
    collector.add(key, ArtifactOrigin::NvdReference, [&] { return fetch_artifact(ref, source); }, ref.url);
  }
  if (!options.follow_links) return std::move(collector.result());

  // Snapshot the first-level list; discoveries are appended behind it.
  const std::vector<LinkedArtifact> first_level = collector.result().artifacts;
  for (const auto& linked : first_level) {
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, Commit>) {
            for (auto n : extract_linked_issue_ids(a.message, a.repo)) collector.add_issue(a.repo, n, ArtifactOrigin::MessageReference);
          } else {
            for (const auto& ref : a.timeline_commits) collector.add_commit(a.repo, ref.sha, ArtifactOrigin::TimelineReference);
            if constexpr (std::is_same_v<T, PullRequest>) {
              for (const auto& sha : a.linked_commit_shas) collector.add_commit(a.repo, sha, ArtifactOrigin::PullRequestCommit);
            }
          }
        },
        linked.artifact);
  }
  return std::move(collector.result());
}

std::vector<CollectedCve> collect_all(std::span<const nvd::CveRecord> cves, ArtifactSource& source, const CollectOptions& options) {
  std::vector<CollectedCve> out(cves.size());
  parallel_for(cves.size(), options.parallelism, [&](std::size_t i) { out[i] = collect_cve(cves[i], source, options); });
  return out;
}

Json to_json(const CollectedCve& collected) {
  Json artifacts = Json::array();
  for (const auto& linked : collected.artifacts) {
    artifacts.push_back(Json{{"origin", std::string(to_string(linked.origin))}, {"artifact", to_json(linked.artifact)}});
  }
  return Json{{"cve_id", collected.cve_id}, {"artifacts", std::move(artifacts)}, {"unavailable", collected.unavailable}};
}

CollectedCve collected_from_json(const Json& row) {
  CollectedCve out;
  try {
    out.cve_id = row.at("cve_id").get<std::string>();
    for (const auto& a : row.at("artifacts")) {
      out.artifacts.push_back(LinkedArtifact{artifact_origin_from_string(a.at("origin").get<std::string>()), artifact_from_json(a.at("artifact"))});
    }
    out.unavailable = row.value("unavailable", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedRecord, std::string("collected artifacts row: ") + e.what());
  }
  return out;
}

}  // namespace pcve::github
