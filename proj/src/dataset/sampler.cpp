#include "pcve/dataset/sampler.hpp"

#include <algorithm>
#include <cctype>

#include "pcve/common/error.hpp"
#include "pcve/common/random.hpp"

namespace pcve::dataset {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool within(Timestamp t, Timestamp anchor, std::int64_t half_window_days) {
  return anchor.plus_days(-half_window_days) <= t && t <= anchor.plus_days(half_window_days);
}

template <typename T, typename Eligible>
std::vector<T> draw(std::span<const T> pool, std::size_t k, std::uint64_t seed, Eligible&& eligible) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "k must be at least 1");
  std::vector<const T*> candidates;
  for (const auto& item : pool) {
    if (eligible(item)) candidates.push_back(&item);
  }
  Rng rng(seed);
  std::vector<T> out;
  for (auto idx : rng.sample_indices(candidates.size(), std::min(k, candidates.size()))) out.push_back(*candidates[idx]);
  return out;
}

}  // namespace

void ExclusionSet::add_commit(const std::string& repo, const std::string& sha) { commits_.insert(lower(repo) + "@" + lower(sha)); }

void ExclusionSet::add_issue(const std::string& repo, std::uint64_t number) {
  issues_.insert(lower(repo) + "#" + std::to_string(number));
}

bool ExclusionSet::excludes_commit(const std::string& repo, const std::string& sha) const {
  const std::string key = lower(repo) + "@" + lower(sha);
  auto it = commits_.lower_bound(key);
  if (it != commits_.end() && it->compare(0, key.size(), key) == 0) return true;  // stored key extends this one
  const std::size_t base = key.find('@') + 1;
  for (std::size_t len = base + 1; len < key.size(); ++len) {
    if (commits_.contains(key.substr(0, len))) return true;
  }
  return false;
}

bool ExclusionSet::excludes_issue(const std::string& repo, std::uint64_t number) const {
  return issues_.contains(lower(repo) + "#" + std::to_string(number));
}

std::vector<std::string> sample_non_vulnerable(std::span<const github::ShallowCommit> repo_commits, const std::string& repo,
                                               Timestamp anchor_time, const ExclusionSet& excluded, const WindowOptions& options,
                                               std::uint64_t seed) {
  auto picked = draw(repo_commits, options.k, seed, [&](const github::ShallowCommit& c) {
    return within(c.authored_at, anchor_time, options.half_window_days) && !excluded.excludes_commit(repo, c.sha);
  });
  std::vector<std::string> out;
  for (auto& c : picked) out.push_back(std::move(c.sha));
  return out;
}

std::vector<github::ShallowIssue> sample_non_vulnerable_issues(std::span<const github::ShallowIssue> repo_issues,
                                                               const std::string& repo, Timestamp anchor_time,
                                                               const ExclusionSet& excluded, const WindowOptions& options,
                                                               std::uint64_t seed) {
  return draw(repo_issues, options.k, seed, [&](const github::ShallowIssue& i) {
    return within(i.created_at, anchor_time, options.half_window_days) && !excluded.excludes_issue(repo, i.number);
  });
}

}  // namespace pcve::dataset
