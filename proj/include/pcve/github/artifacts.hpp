#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pcve/common/io.hpp"
#include "pcve/common/time.hpp"
#include "pcve/dataset/language.hpp"

namespace pcve::github {

struct Comment {
  std::string author;
  Timestamp created_at;
  std::string text;

  friend bool operator==(const Comment&, const Comment&) = default;
};

struct LabelEvent {
  std::string label;
  Timestamp added_at;

  friend bool operator==(const LabelEvent&, const LabelEvent&) = default;
};

// A commit mentioned from an issue/PR timeline ("referenced" events).
struct TimelineCommitRef {
  std::string sha;
  Timestamp at;

  friend bool operator==(const TimelineCommitRef&, const TimelineCommitRef&) = default;
};

// Another issue or PR that mentioned this one ("cross-referenced" events).
struct TimelineIssueRef {
  std::string repo;
  std::uint64_t number = 0;
  bool is_pull_request = false;
  Timestamp at;

  friend bool operator==(const TimelineIssueRef&, const TimelineIssueRef&) = default;
};

struct Issue {
  std::string repo;
  std::uint64_t number = 0;
  std::string title;
  std::string body;
  Timestamp created_at;
  bool is_pull_request = false;
  std::vector<Comment> comments;       // ascending by created_at
  std::vector<LabelEvent> label_events;
  std::vector<TimelineCommitRef> timeline_commits;
  std::vector<TimelineIssueRef> cross_references;

  friend bool operator==(const Issue&, const Issue&) = default;
};

struct PullRequest : Issue {
  std::vector<std::string> linked_commit_shas;  // unique
  std::optional<Timestamp> merged_at;

  friend bool operator==(const PullRequest&, const PullRequest&) = default;
};

struct CommitFile {
  std::string path;
  Language language = Language::Unsupported;
  std::string patch;  // unified-diff hunks as served by the API

  friend bool operator==(const CommitFile&, const CommitFile&) = default;
};

struct Commit {
  std::string repo;
  std::string sha;
  std::string message;
  Timestamp authored_at;
  std::vector<CommitFile> files;

  friend bool operator==(const Commit&, const Commit&) = default;
};

struct ShallowCommit {
  std::string sha;
  Timestamp authored_at;
  std::string message;

  friend bool operator==(const ShallowCommit&, const ShallowCommit&) = default;
};

struct ShallowIssue {
  std::uint64_t number = 0;
  Timestamp created_at;
  bool is_pull_request = false;

  friend bool operator==(const ShallowIssue&, const ShallowIssue&) = default;
};

using Artifact = std::variant<Issue, PullRequest, Commit>;

enum class ArtifactOrigin { NvdReference, TimelineReference, MessageReference, PullRequestCommit, Sampled };

std::string_view to_string(ArtifactOrigin origin);
ArtifactOrigin artifact_origin_from_string(std::string_view text);

struct LinkedArtifact {
  ArtifactOrigin origin = ArtifactOrigin::NvdReference;
  Artifact artifact;
};

// Primary timestamp: creation for issues/PRs, authorship for commits.
Timestamp artifact_time(const Artifact& artifact);
std::string artifact_key(const Artifact& artifact);  // "owner/name#12", "owner/name@sha"

bool is_valid_sha(std::string_view sha);

Json to_json(const Issue& issue);
Json to_json(const PullRequest& pull);
Json to_json(const Commit& commit);
Json to_json(const Artifact& artifact);  // tagged with "kind"
Json to_json(const ShallowCommit& commit);
Json to_json(const ShallowIssue& issue);

Issue issue_from_json(const Json& row);
PullRequest pull_from_json(const Json& row);
Commit commit_from_json(const Json& row);
Artifact artifact_from_json(const Json& row);
ShallowCommit shallow_commit_from_json(const Json& row);
ShallowIssue shallow_issue_from_json(const Json& row);

}  // namespace pcve::github
