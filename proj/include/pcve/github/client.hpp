#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pcve/common/http.hpp"
#include "pcve/github/artifacts.hpp"
#include "pcve/github/rate_limit.hpp"

namespace pcve::github {

// Where artifacts come from. Implementations throw Error{NotFound,
// RateLimited, AuthFailure, NetworkFailure}.
class ArtifactSource {
public:
  virtual ~ArtifactSource() = default;

  // May return a PR-flavoured issue (is_pull_request = true).
  virtual Issue fetch_issue(const std::string& repo, std::uint64_t number) = 0;
  virtual PullRequest fetch_pull(const std::string& repo, std::uint64_t number) = 0;
  virtual Commit fetch_commit(const std::string& repo, const std::string& sha) = 0;
  // Window bounds are inclusive; order is unspecified.
  virtual std::vector<ShallowCommit> list_commits(const std::string& repo, Timestamp lo, Timestamp hi) = 0;
  virtual std::vector<ShallowIssue> list_issues(const std::string& repo, Timestamp lo, Timestamp hi) = 0;
};

struct ClientOptions {
  std::string api_base = "https://api.github.com";
  std::string token;  // usually $GITHUB_TOKEN
  RetryPolicy retry;
  std::uint64_t jitter_seed = 0;
  Clock clock = system_clock();
  Sleeper sleep = thread_sleeper();
};

// GitHub REST v3 client: issues, pulls, commits and issue timeline events.
class GitHubClient final : public ArtifactSource {
public:
  GitHubClient(std::shared_ptr<http::Transport> transport, ClientOptions options);

  Issue fetch_issue(const std::string& repo, std::uint64_t number) override;
  PullRequest fetch_pull(const std::string& repo, std::uint64_t number) override;
  Commit fetch_commit(const std::string& repo, const std::string& sha) override;
  std::vector<ShallowCommit> list_commits(const std::string& repo, Timestamp lo, Timestamp hi) override;
  std::vector<ShallowIssue> list_issues(const std::string& repo, Timestamp lo, Timestamp hi) override;

  // One GET with quota accounting and retries; returns the parsed body.
  Json get_json(const std::string& path_and_query);
  // Follows Link rel="next" and concatenates array pages.
  Json get_paged(const std::string& path_and_query);

private:
  struct Page {
    Json body;
    std::optional<std::string> next_url;
  };
  Page get_page(const std::string& url);
  void fill_discussion(const std::string& repo, std::uint64_t number, Issue& issue);

  std::shared_ptr<http::Transport> transport_;
  ClientOptions options_;
  QuotaBucket quota_;
  Backoff backoff_;
};

// Read-through cache at <root>/<owner>/<name>/<kind>/<locator>.json. An entry
// once written is served forever; nothing refreshes it.
class CachedArtifactSource final : public ArtifactSource {
public:
  CachedArtifactSource(std::shared_ptr<ArtifactSource> upstream, std::filesystem::path root);

  Issue fetch_issue(const std::string& repo, std::uint64_t number) override;
  PullRequest fetch_pull(const std::string& repo, std::uint64_t number) override;
  Commit fetch_commit(const std::string& repo, const std::string& sha) override;
  std::vector<ShallowCommit> list_commits(const std::string& repo, Timestamp lo, Timestamp hi) override;
  std::vector<ShallowIssue> list_issues(const std::string& repo, Timestamp lo, Timestamp hi) override;

  std::filesystem::path entry_path(const std::string& repo, const std::string& kind, const std::string& locator) const;

private:
  template <typename Fetch>
  Json cached(const std::string& repo, const std::string& kind, const std::string& locator, Fetch&& fetch);

  std::shared_ptr<ArtifactSource> upstream_;
  std::filesystem::path root_;
  std::array<std::mutex, 64> key_locks_;
};

void validate_repo(const std::string& repo);
std::optional<std::string> next_link(const std::string& link_header);

}  // namespace pcve::github
