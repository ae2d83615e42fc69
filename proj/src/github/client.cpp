#include "pcve/github/client.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "pcve/common/error.hpp"
#include "pcve/common/hash.hpp"
#include "pcve/dataset/language.hpp"

namespace pcve::github {

namespace fs = std::filesystem;

void validate_repo(const std::string& repo) {
  static const std::regex pattern(R"([A-Za-z0-9_.-]+/[A-Za-z0-9_.-]+)");
  if (!std::regex_match(repo, pattern)) fail(ErrorKind::InvalidArgument, "repository must be 'owner/name', got '" + repo + "'");
}

std::optional<std::string> next_link(const std::string& link_header) {
  static const std::regex part(R"re(<([^>]+)>\s*;\s*rel="([^"]+)")re");
  for (auto it = std::sregex_iterator(link_header.begin(), link_header.end(), part); it != std::sregex_iterator(); ++it) {
    if ((*it)[2] == "next") return (*it)[1].str();
  }
  return std::nullopt;
}

namespace {

std::string text_or_empty(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

Timestamp required_time(const Json& obj, const char* key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) fail(ErrorKind::MalformedRecord, context + " lacks '" + key + "'");
  return Timestamp::parse(it->get<std::string>());
}

std::string login_of(const Json& obj) {
  auto user = obj.find("user");
  if (user == obj.end() || !user->is_object()) return {};
  return text_or_empty(*user, "login");
}

}  // namespace

GitHubClient::GitHubClient(std::shared_ptr<http::Transport> transport, ClientOptions options)
    : transport_(std::move(transport)), options_(std::move(options)), backoff_(options_.retry, options_.jitter_seed) {}

GitHubClient::Page GitHubClient::get_page(const std::string& url) {
  http::Request request;
  request.url = url;
  request.headers["Accept"] = "application/vnd.github+json";
  request.headers["X-GitHub-Api-Version"] = "2022-11-28";
  if (!options_.token.empty()) request.headers["Authorization"] = "Bearer " + options_.token;

  const int max_retries = options_.retry.max_retries;
  for (int attempt = 0;; ++attempt) {
    if (auto wait = quota_.acquire(options_.clock()); wait.count() > 0) options_.sleep(wait);

    http::Response response;
    try {
      response = transport_->send(request);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NetworkFailure || attempt >= max_retries) throw;
      options_.sleep(backoff_.delay(attempt));
      continue;
    }
    quota_.observe(response);

    const int status = response.status;
    if (status >= 200 && status < 300) {
      Page page;
      page.body = parse_json(response.body, url);
      if (auto link = response.header("link")) page.next_url = next_link(*link);
      return page;
    }
    if (status == 404 || status == 410) fail(ErrorKind::NotFound, url);
    if (status == 401) fail(ErrorKind::AuthFailure, url + ": bad credentials");

    const bool quota_exhausted = response.header("x-ratelimit-remaining") == std::optional<std::string>("0");
    const bool rate_limited = status == 429 || (status == 403 && (quota_exhausted || response.body.find("rate limit") != std::string::npos));
    if (status == 403 && !rate_limited) fail(ErrorKind::AuthFailure, url + ": forbidden");

    if (rate_limited || status >= 500) {
      if (attempt >= max_retries) {
        fail(rate_limited ? ErrorKind::RateLimited : ErrorKind::NetworkFailure,
             url + ": giving up after " + std::to_string(attempt + 1) + " attempts (HTTP " + std::to_string(status) + ")");
      }
      std::optional<std::chrono::milliseconds> retry_after;
      if (auto ra = response.header("retry-after")) {
        try {
          retry_after = std::chrono::seconds(std::stoll(*ra));
        } catch (const std::exception&) {
        }
      }
      options_.sleep(backoff_.delay(attempt, retry_after));
      continue;
    }
    fail(ErrorKind::NetworkFailure, url + ": unexpected HTTP " + std::to_string(status));
  }
}

Json GitHubClient::get_json(const std::string& path_and_query) { return get_page(options_.api_base + path_and_query).body; }

Json GitHubClient::get_paged(const std::string& path_and_query) {
  Json all = Json::array();
  std::optional<std::string> url = options_.api_base + path_and_query;
  std::set<std::string> seen;
  while (url && seen.insert(*url).second) {
    Page page = get_page(*url);
    if (!page.body.is_array()) fail(ErrorKind::MalformedRecord, *url + ": expected a JSON array");
    for (auto& item : page.body) all.push_back(std::move(item));
    url = page.next_url;
  }
  return all;
}

void GitHubClient::fill_discussion(const std::string& repo, std::uint64_t number, Issue& issue) {
  const std::string base = "/repos/" + repo + "/issues/" + std::to_string(number);
  const std::string context = repo + "#" + std::to_string(number);

  for (const auto& c : get_paged(base + "/comments?per_page=100")) {
    issue.comments.push_back(Comment{login_of(c), required_time(c, "created_at", context + " comment"), text_or_empty(c, "body")});
  }
  std::stable_sort(issue.comments.begin(), issue.comments.end(),
                   [](const Comment& a, const Comment& b) { return a.created_at < b.created_at; });

  for (const auto& event : get_paged(base + "/timeline?per_page=100")) {
    const std::string kind = text_or_empty(event, "event");
    if (kind == "labeled") {
      auto label = event.find("label");
      if (label == event.end()) continue;
      Timestamp at = required_time(event, "created_at", context + " label event");
      if (at < issue.created_at) continue;
      issue.label_events.push_back(LabelEvent{text_or_empty(*label, "name"), at});
    } else if (kind == "referenced" || kind == "closed") {
      std::string sha = text_or_empty(event, "commit_id");
      if (!is_valid_sha(sha)) continue;
      issue.timeline_commits.push_back(TimelineCommitRef{sha, required_time(event, "created_at", context + " reference event")});
    } else if (kind == "cross-referenced") {
      auto source = event.find("source");
      if (source == event.end() || !source->contains("issue")) continue;
      const Json& other = (*source)["issue"];
      TimelineIssueRef ref;
      ref.number = other.value("number", std::uint64_t{0});
      ref.is_pull_request = other.contains("pull_request");
      ref.at = required_time(event, "created_at", context + " cross-reference");
      if (other.contains("repository")) ref.repo = text_or_empty(other["repository"], "full_name");
      if (ref.repo.empty()) ref.repo = repo;
      if (ref.number > 0) issue.cross_references.push_back(std::move(ref));
    }
  }
  auto dedupe = [](auto& items, auto key) {
    std::set<std::string> seen;
    std::erase_if(items, [&](const auto& item) { return !seen.insert(key(item)).second; });
  };
  dedupe(issue.timeline_commits, [](const TimelineCommitRef& r) { return r.sha; });
  dedupe(issue.cross_references, [](const TimelineIssueRef& r) { return r.repo + "#" + std::to_string(r.number); });
}

Issue GitHubClient::fetch_issue(const std::string& repo, std::uint64_t number) {
  validate_repo(repo);
  const Json raw = get_json("/repos/" + repo + "/issues/" + std::to_string(number));
  Issue issue;
  issue.repo = repo;
  issue.number = number;
  issue.title = text_or_empty(raw, "title");
  issue.body = text_or_empty(raw, "body");
  issue.created_at = required_time(raw, "created_at", repo + "#" + std::to_string(number));
  issue.is_pull_request = raw.contains("pull_request");
  fill_discussion(repo, number, issue);
  return issue;
}

PullRequest GitHubClient::fetch_pull(const std::string& repo, std::uint64_t number) {
  validate_repo(repo);
  const std::string base = "/repos/" + repo + "/pulls/" + std::to_string(number);
  const Json raw = get_json(base);
  PullRequest pull;
  pull.repo = repo;
  pull.number = number;
  pull.title = text_or_empty(raw, "title");
  pull.body = text_or_empty(raw, "body");
  pull.created_at = required_time(raw, "created_at", repo + "!" + std::to_string(number));
  pull.is_pull_request = true;
  if (auto merged = raw.find("merged_at"); merged != raw.end() && merged->is_string()) {
    pull.merged_at = Timestamp::parse(merged->get<std::string>());
  }
  fill_discussion(repo, number, pull);
  for (const auto& c : get_paged(base + "/commits?per_page=100")) {
    std::string sha = text_or_empty(c, "sha");
    if (is_valid_sha(sha) && std::find(pull.linked_commit_shas.begin(), pull.linked_commit_shas.end(), sha) == pull.linked_commit_shas.end()) {
      pull.linked_commit_shas.push_back(sha);
    }
  }
  return pull;
}

Commit GitHubClient::fetch_commit(const std::string& repo, const std::string& sha) {
  validate_repo(repo);
  if (!is_valid_sha(sha)) fail(ErrorKind::InvalidArgument, "not a commit sha: '" + sha + "'");
  const Json raw = get_json("/repos/" + repo + "/commits/" + sha);
  Commit commit;
  commit.repo = repo;
  commit.sha = text_or_empty(raw, "sha");
  if (commit.sha.empty()) commit.sha = sha;
  const Json& meta = raw.at("commit");
  commit.message = text_or_empty(meta, "message");
  commit.authored_at = required_time(meta.at("author"), "date", repo + "@" + sha);
  if (auto files = raw.find("files"); files != raw.end() && files->is_array()) {
    for (const auto& f : *files) {
      std::string path = text_or_empty(f, "filename");
      commit.files.push_back(CommitFile{path, dataset::detect_language(path), text_or_empty(f, "patch")});
    }
  }
  return commit;
}

std::vector<ShallowCommit> GitHubClient::list_commits(const std::string& repo, Timestamp lo, Timestamp hi) {
  validate_repo(repo);
  const Json raw = get_paged("/repos/" + repo + "/commits?since=" + lo.iso8601() + "&until=" + hi.iso8601() + "&per_page=100");
  std::vector<ShallowCommit> out;
  for (const auto& c : raw) {
    const Json& meta = c.at("commit");
    out.push_back(ShallowCommit{text_or_empty(c, "sha"), required_time(meta.at("author"), "date", repo + " commit list"),
                                text_or_empty(meta, "message")});
  }
  return out;
}

std::vector<ShallowIssue> GitHubClient::list_issues(const std::string& repo, Timestamp lo, Timestamp hi) {
  validate_repo(repo);
  const Json raw = get_paged("/repos/" + repo + "/issues?state=all&sort=created&direction=asc&since=" + lo.iso8601() + "&per_page=100");
  std::vector<ShallowIssue> out;
  for (const auto& item : raw) {
    ShallowIssue issue{item.value("number", std::uint64_t{0}), required_time(item, "created_at", repo + " issue list"),
                       item.contains("pull_request")};
    if (issue.number > 0 && issue.created_at >= lo && issue.created_at <= hi) out.push_back(issue);
  }
  return out;
}

CachedArtifactSource::CachedArtifactSource(std::shared_ptr<ArtifactSource> upstream, fs::path root)
    : upstream_(std::move(upstream)), root_(std::move(root)) {}

fs::path CachedArtifactSource::entry_path(const std::string& repo, const std::string& kind, const std::string& locator) const {
  validate_repo(repo);
  return root_ / repo / kind / (locator + ".json");
}

template <typename Fetch>
Json CachedArtifactSource::cached(const std::string& repo, const std::string& kind, const std::string& locator, Fetch&& fetch) {
  const fs::path path = entry_path(repo, kind, locator);
  std::mutex& lock = key_locks_[fnv1a64(path.string()) % key_locks_.size()];
  std::lock_guard guard(lock);
  if (fs::is_regular_file(path)) return parse_json(read_file(path), path.string());
  Json value = fetch();
  write_file_atomic(path, value.dump(1) + "\n");
  return value;
}

Issue CachedArtifactSource::fetch_issue(const std::string& repo, std::uint64_t number) {
  return issue_from_json(cached(repo, "issue", std::to_string(number), [&] { return to_json(upstream_->fetch_issue(repo, number)); }));
}

PullRequest CachedArtifactSource::fetch_pull(const std::string& repo, std::uint64_t number) {
  return pull_from_json(cached(repo, "pull", std::to_string(number), [&] { return to_json(upstream_->fetch_pull(repo, number)); }));
}

Commit CachedArtifactSource::fetch_commit(const std::string& repo, const std::string& sha) {
  return commit_from_json(cached(repo, "commit", sha, [&] { return to_json(upstream_->fetch_commit(repo, sha)); }));
}

std::vector<ShallowCommit> CachedArtifactSource::list_commits(const std::string& repo, Timestamp lo, Timestamp hi) {
  const std::string key = std::to_string(lo.unix_seconds()) + "_" + std::to_string(hi.unix_seconds());
  Json rows = cached(repo, "commit_list", key, [&] {
    Json out = Json::array();
    for (const auto& c : upstream_->list_commits(repo, lo, hi)) out.push_back(to_json(c));
    return out;
  });
  std::vector<ShallowCommit> out;
  for (const auto& r : rows) out.push_back(shallow_commit_from_json(r));
  return out;
}

std::vector<ShallowIssue> CachedArtifactSource::list_issues(const std::string& repo, Timestamp lo, Timestamp hi) {
  const std::string key = std::to_string(lo.unix_seconds()) + "_" + std::to_string(hi.unix_seconds());
  Json rows = cached(repo, "issue_list", key, [&] {
    Json out = Json::array();
    for (const auto& i : upstream_->list_issues(repo, lo, hi)) out.push_back(to_json(i));
    return out;
  });
  std::vector<ShallowIssue> out;
  for (const auto& r : rows) out.push_back(shallow_issue_from_json(r));
  return out;
}

}  // namespace pcve::github
