#include "pcve/github/artifacts.hpp"

#include <algorithm>
#include <cctype>

#include "pcve/common/error.hpp"

namespace pcve::github {

std::string_view to_string(ArtifactOrigin origin) {
  switch (origin) {
    case ArtifactOrigin::NvdReference: return "nvd_reference";
    case ArtifactOrigin::TimelineReference: return "timeline_reference";
    case ArtifactOrigin::MessageReference: return "message_reference";
    case ArtifactOrigin::PullRequestCommit: return "pull_request_commit";
    case ArtifactOrigin::Sampled: return "sampled";
  }
  return "nvd_reference";
}

ArtifactOrigin artifact_origin_from_string(std::string_view text) {
  if (text == "nvd_reference") return ArtifactOrigin::NvdReference;
  if (text == "timeline_reference") return ArtifactOrigin::TimelineReference;
  if (text == "message_reference") return ArtifactOrigin::MessageReference;
  if (text == "pull_request_commit") return ArtifactOrigin::PullRequestCommit;
  if (text == "sampled") return ArtifactOrigin::Sampled;
  fail(ErrorKind::MalformedRecord, "unknown artifact origin '" + std::string(text) + "'");
}

Timestamp artifact_time(const Artifact& artifact) {
  return std::visit(
      [](const auto& a) -> Timestamp {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Commit>) {
          return a.authored_at;
        } else {
          return a.created_at;
        }
      },
      artifact);
}

std::string artifact_key(const Artifact& artifact) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Commit>) {
          return a.repo + "@" + a.sha;
        } else {
          return a.repo + "#" + std::to_string(a.number);
        }
      },
      artifact);
}

bool is_valid_sha(std::string_view sha) {
  return sha.size() >= 7 && sha.size() <= 40 &&
         std::all_of(sha.begin(), sha.end(), [](unsigned char c) { return std::isxdigit(c) != 0; });
}

namespace {

Json discussion_fields(const Issue& issue) {
  Json comments = Json::array();
  for (const auto& c : issue.comments) {
    comments.push_back(Json{{"author", c.author}, {"created_at", c.created_at.iso8601()}, {"text", c.text}});
  }
  Json labels = Json::array();
  for (const auto& l : issue.label_events) {
    labels.push_back(Json{{"label", l.label}, {"added_at", l.added_at.iso8601()}});
  }
  Json commits = Json::array();
  for (const auto& t : issue.timeline_commits) {
    commits.push_back(Json{{"sha", t.sha}, {"at", t.at.iso8601()}});
  }
  Json xrefs = Json::array();
  for (const auto& x : issue.cross_references) {
    xrefs.push_back(Json{{"repo", x.repo}, {"number", x.number}, {"is_pull_request", x.is_pull_request}, {"at", x.at.iso8601()}});
  }
  return Json{{"repo", issue.repo},
              {"number", issue.number},
              {"title", issue.title},
              {"body", issue.body},
              {"created_at", issue.created_at.iso8601()},
              {"is_pull_request", issue.is_pull_request},
              {"comments", std::move(comments)},
              {"label_events", std::move(labels)},
              {"timeline_commits", std::move(commits)},
              {"cross_references", std::move(xrefs)}};
}

void read_discussion(const Json& row, Issue& issue) {
  issue.repo = row.at("repo").get<std::string>();
  issue.number = row.at("number").get<std::uint64_t>();
  issue.title = row.value("title", std::string{});
  issue.body = row.value("body", std::string{});
  issue.created_at = Timestamp::parse(row.at("created_at").get<std::string>());
  issue.is_pull_request = row.value("is_pull_request", false);
  for (const auto& c : row.value("comments", Json::array())) {
    issue.comments.push_back(Comment{c.at("author").get<std::string>(), Timestamp::parse(c.at("created_at").get<std::string>()),
                                     c.at("text").get<std::string>()});
  }
  for (const auto& l : row.value("label_events", Json::array())) {
    issue.label_events.push_back(LabelEvent{l.at("label").get<std::string>(), Timestamp::parse(l.at("added_at").get<std::string>())});
  }
  for (const auto& t : row.value("timeline_commits", Json::array())) {
    issue.timeline_commits.push_back(TimelineCommitRef{t.at("sha").get<std::string>(), Timestamp::parse(t.at("at").get<std::string>())});
  }
  for (const auto& x : row.value("cross_references", Json::array())) {
    issue.cross_references.push_back(TimelineIssueRef{x.at("repo").get<std::string>(), x.at("number").get<std::uint64_t>(),
                                                      x.value("is_pull_request", false),
                                                      Timestamp::parse(x.at("at").get<std::string>())});
  }
}

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedRecord, std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json to_json(const Issue& issue) { return discussion_fields(issue); }

Json to_json(const PullRequest& pull) {
  Json row = discussion_fields(pull);
  row["linked_commit_shas"] = pull.linked_commit_shas;
  row["merged_at"] = pull.merged_at ? Json(pull.merged_at->iso8601()) : Json(nullptr);
  return row;
}

Json to_json(const Commit& commit) {
  Json files = Json::array();
  for (const auto& f : commit.files) {
    files.push_back(Json{{"path", f.path}, {"language", std::string(to_string(f.language))}, {"patch", f.patch}});
  }
  return Json{{"repo", commit.repo},
              {"sha", commit.sha},
              {"message", commit.message},
              {"authored_at", commit.authored_at.iso8601()},
              {"files", std::move(files)}};
}

Json to_json(const Artifact& artifact) {
  return std::visit(
      [](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        Json row;
        if constexpr (std::is_same_v<T, Issue>) {
          row["kind"] = "issue";
        } else if constexpr (std::is_same_v<T, PullRequest>) {
          row["kind"] = "pull";
        } else {
          row["kind"] = "commit";
        }
        row.update(to_json(a));
        return row;
      },
      artifact);
}

Json to_json(const ShallowCommit& commit) {
  return Json{{"sha", commit.sha}, {"authored_at", commit.authored_at.iso8601()}, {"message", commit.message}};
}

Json to_json(const ShallowIssue& issue) {
  return Json{{"number", issue.number}, {"created_at", issue.created_at.iso8601()}, {"is_pull_request", issue.is_pull_request}};
}

Issue issue_from_json(const Json& row) {
  return guarded("issue", [&] {
    Issue issue;
    read_discussion(row, issue);
    return issue;
  });
}

PullRequest pull_from_json(const Json& row) {
  return guarded("pull request", [&] {
    PullRequest pull;
    read_discussion(row, pull);
    pull.linked_commit_shas = row.value("linked_commit_shas", std::vector<std::string>{});
    if (row.contains("merged_at") && !row["merged_at"].is_null()) {
      pull.merged_at = Timestamp::parse(row["merged_at"].get<std::string>());
    }
    return pull;
  });
}

Commit commit_from_json(const Json& row) {
  return guarded("commit", [&] {
    Commit commit;
    commit.repo = row.at("repo").get<std::string>();
    commit.sha = row.at("sha").get<std::string>();
    commit.message = row.value("message", std::string{});
    commit.authored_at = Timestamp::parse(row.at("authored_at").get<std::string>());
    for (const auto& f : row.value("files", Json::array())) {
      commit.files.push_back(CommitFile{f.at("path").get<std::string>(), language_from_string(f.at("language").get<std::string>()),
                                        f.value("patch", std::string{})});
    }
    return commit;
  });
}

Artifact artifact_from_json(const Json& row) {
  const std::string kind = guarded("artifact", [&] { return row.at("kind").get<std::string>(); });
  if (kind == "issue") return issue_from_json(row);
  if (kind == "pull") return pull_from_json(row);
  if (kind == "commit") return commit_from_json(row);
  fail(ErrorKind::MalformedRecord, "unknown artifact kind '" + kind + "'");
}

ShallowCommit shallow_commit_from_json(const Json& row) {
  return guarded("shallow commit", [&] {
    return ShallowCommit{row.at("sha").get<std::string>(), Timestamp::parse(row.at("authored_at").get<std::string>()),
                         row.value("message", std::string{})};
  });
}

ShallowIssue shallow_issue_from_json(const Json& row) {
  return guarded("shallow issue", [&] {
    return ShallowIssue{row.at("number").get<std::uint64_t>(), Timestamp::parse(row.at("created_at").get<std::string>()),
                        row.value("is_pull_request", false)};
  });
}

}  // namespace pcve::github
