#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pcve/github/artifacts.hpp"
#include "pcve/github/client.hpp"
#include "pcve/nvd/cve_record.hpp"

namespace pcve::github {

// ref.kind must be Commit, Issue or Pull. An Issue reference that resolves
// to a pull request comes back as a PullRequest.
Artifact fetch_artifact(const nvd::ReferenceLink& ref, ArtifactSource& source);

// Shallow commits authored in [lo, hi], ascending by authored_at (ties by sha).
std::vector<ShallowCommit> list_repo_commits(const std::string& repo, Timestamp lo, Timestamp hi, ArtifactSource& source);

struct CollectedCve {
  std::string cve_id;
  std::vector<LinkedArtifact> artifacts;  // unique by artifact_key, discovery order
  std::vector<std::string> unavailable;   // references that came back NotFound
};

struct CollectOptions {
  std::size_t parallelism = 8;
  bool follow_links = true;  // one hop through timelines, PR commits and messages
};

// Fetches every NVD-referenced artifact of a CVE, then (when follow_links)
// the commits named by issue/PR timelines and PR commit lists, and the
// same-repo issues named in commit messages.
CollectedCve collect_cve(const nvd::CveRecord& cve, ArtifactSource& source, const CollectOptions& options = {});

std::vector<CollectedCve> collect_all(std::span<const nvd::CveRecord> cves, ArtifactSource& source, const CollectOptions& options = {});

Json to_json(const CollectedCve& collected);
CollectedCve collected_from_json(const Json& row);

}  // namespace pcve::github
