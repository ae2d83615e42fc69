#pragma once

#include <atomic>
#include <map>
#include <string>

#include "pcve/common/error.hpp"
#include "pcve/github/client.hpp"

namespace pcve::testing {

// In-memory artifact store. Missing keys raise NotFound like the API does.
class FakeSource final : public github::ArtifactSource {
public:
  std::map<std::string, github::Issue> issues;        // "repo#n"
  std::map<std::string, github::PullRequest> pulls;   // "repo#n"
  std::map<std::string, github::Commit> commits;      // "repo@sha"
  std::map<std::string, std::vector<github::ShallowCommit>> commit_lists;  // repo
  std::map<std::string, std::vector<github::ShallowIssue>> issue_lists;    // repo
  std::atomic<int> fetches{0};

  void add(const github::Issue& i) {
    issues[i.repo + "#" + std::to_string(i.number)] = i;
    issue_lists[i.repo].push_back({i.number, i.created_at, i.is_pull_request});
  }
  void add(const github::PullRequest& p) {
    pulls[p.repo + "#" + std::to_string(p.number)] = p;
    github::Issue as_issue = p;
    as_issue.is_pull_request = true;
    issues[p.repo + "#" + std::to_string(p.number)] = as_issue;
    issue_lists[p.repo].push_back({p.number, p.created_at, true});
  }
  void add(const github::Commit& c) {
    commits[c.repo + "@" + c.sha] = c;
    commit_lists[c.repo].push_back({c.sha, c.authored_at, c.message});
  }

  github::Issue fetch_issue(const std::string& repo, std::uint64_t number) override {
    return get(issues, repo + "#" + std::to_string(number));
  }
  github::PullRequest fetch_pull(const std::string& repo, std::uint64_t number) override {
    return get(pulls, repo + "#" + std::to_string(number));
  }
  github::Commit fetch_commit(const std::string& repo, const std::string& sha) override { return get(commits, repo + "@" + sha); }
  std::vector<github::ShallowCommit> list_commits(const std::string& repo, Timestamp lo, Timestamp hi) override {
    std::vector<github::ShallowCommit> out;
    for (const auto& c : commit_lists[repo]) {
      if (c.authored_at >= lo && c.authored_at <= hi) out.push_back(c);
    }
    return out;
  }
  std::vector<github::ShallowIssue> list_issues(const std::string& repo, Timestamp lo, Timestamp hi) override {
    std::vector<github::ShallowIssue> out;
    for (const auto& i : issue_lists[repo]) {
      if (i.created_at >= lo && i.created_at <= hi) out.push_back(i);
    }
    return out;
  }

private:
  template <typename M>
  typename M::mapped_type get(M& map, const std::string& key) {
    ++fetches;
    auto it = map.find(key);
    if (it == map.end()) fail(ErrorKind::NotFound, key);
    return it->second;
  }
};

inline github::Commit make_commit(const std::string& repo, const std::string& sha, Timestamp at, const std::string& message = "change",
                                  const std::string& path = "src/a.c") {
  github::Commit c;
  c.repo = repo;
  c.sha = sha;
  c.message = message;
  c.authored_at = at;
  c.files.push_back({path, dataset::detect_language(path), "@@ -1,1 +1,2 @@\n ctx\n+int x = 1;\n"});
  return c;
}

inline github::Issue make_issue(const std::string& repo, std::uint64_t number, Timestamp at, const std::string& title = "title") {
  github::Issue i;
  i.repo = repo;
  i.number = number;
  i.title = title;
  i.body = "body of " + title;
  i.created_at = at;
  return i;
}

// 40-hex sha derived from an integer.
inline std::string sha_of(std::uint64_t n) {
  static const char* hex = "0123456789abcdef";
  std::string s(40, '0');
  for (int i = 39; i >= 0 && n; --i, n >>= 4) s[static_cast<std::size_t>(i)] = hex[n & 15];
  s[0] = 'a';
  return s;
}

}  // namespace pcve::testing
