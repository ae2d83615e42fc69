#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pcve/common/time.hpp"
#include "pcve/github/artifacts.hpp"

namespace pcve::dataset {

// Commits and discussions that must never be drawn as non-vulnerable material.
// Commit shas match by prefix in either direction, since NVD links often
// carry abbreviated shas.
class ExclusionSet {
public:
  void add_commit(const std::string& repo, const std::string& sha);
  void add_issue(const std::string& repo, std::uint64_t number);

  bool excludes_commit(const std::string& repo, const std::string& sha) const;
  bool excludes_issue(const std::string& repo, std::uint64_t number) const;
  std::size_t size() const { return commits_.size() + issues_.size(); }

private:
  std::set<std::string> commits_;  // "repo@sha", lowercase
  std::set<std::string> issues_;   // "repo#n"
};

struct WindowOptions {
  std::size_t k = 5;
  std::int64_t half_window_days = 183;
};

// Uniform draw without replacement of min(k, eligible) commits authored in
// [anchor - w, anchor + w] and not excluded. Result is in draw order.
std::vector<std::string> sample_non_vulnerable(std::span<const github::ShallowCommit> repo_commits, const std::string& repo,
                                               Timestamp anchor_time, const ExclusionSet& excluded, const WindowOptions& options,
                                               std::uint64_t seed);

// Same rule over the issue/PR listing.
std::vector<github::ShallowIssue> sample_non_vulnerable_issues(std::span<const github::ShallowIssue> repo_issues,
                                                               const std::string& repo, Timestamp anchor_time,
                                                               const ExclusionSet& excluded, const WindowOptions& options,
                                                               std::uint64_t seed);

}  // namespace pcve::dataset
