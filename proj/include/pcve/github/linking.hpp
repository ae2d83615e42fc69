#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pcve/github/artifacts.hpp"

namespace pcve::github {

// Issue numbers a commit message points at within `repo`: "#40", "GH-40",
// "owner/name#40" and https://github.com/owner/name/{issues,pull}/40 (same
// repo only, case-insensitive). Deduplicated, ascending.
//
// The pattern set is a superset guess of the usual issue-reference
// conventions; it deliberately includes bare "#N", so false positives such as
// "step #2" are possible.
std::vector<std::uint64_t> extract_linked_issue_ids(std::string_view message, std::string_view repo);

// Content of an issue as it stood at `cutoff`: title and body as created,
// comments/labels/timeline entries dated at or before the cutoff.
Issue snapshot_as_of(const Issue& issue, Timestamp cutoff);
PullRequest snapshot_as_of(const PullRequest& pull, Timestamp cutoff);

struct IssueCommitPair {
  Issue issue_snapshot;
  Commit commit;
  Timestamp link_established_at;
};

// Both artifacts must predate disclosure. If the issue came first its
// content is taken as of the commit; otherwise only the issue's title and
// body (as of its own creation) are kept.
IssueCommitPair pair_issue_commit(const Issue& issue, const Commit& commit, Timestamp disclosed_at);

}  // namespace pcve::github
