#include "pcve/github/linking.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "pcve/common/error.hpp"

namespace pcve::github {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

void add_number(std::set<std::uint64_t>& out, const std::string& digits) {
  if (digits.empty() || digits.size() > 18) return;
  std::uint64_t n = std::stoull(digits);
  if (n > 0) out.insert(n);
}

}  // namespace

std::vector<std::uint64_t> extract_linked_issue_ids(std::string_view message, std::string_view repo) {
  static const std::regex url_ref(R"(https?://(?:www\.)?github\.com/([\w.-]+/[\w.-]+)/(?:issues|pull)/(\d+))",
                                  std::regex::icase);
  static const std::regex hash_ref(R"((^|[^\w/#&])(?:([\w.-]+/[\w.-]+))?#(\d+)\b)");
  static const std::regex gh_ref(R"((^|[^\w-])GH-(\d+)\b)", std::regex::icase);

  const std::string text(message);
  const std::string self = lower(repo);
  std::set<std::uint64_t> found;

  // URLs first; blank them out so their path segments cannot feed the
  // shorthand patterns.
  std::string rest = text;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), url_ref); it != std::sregex_iterator(); ++it) {
    if (lower((*it)[1].str()) == self) add_number(found, (*it)[2].str());
    std::fill(rest.begin() + it->position(), rest.begin() + it->position() + it->length(), ' ');
  }
  // Drop any other URL text so fragments like "#L20" or "#issuecomment-1" stay inert.
  static const std::regex any_url(R"(https?://\S+)", std::regex::icase);
  rest = std::regex_replace(rest, any_url, " ");

  for (auto it = std::sregex_iterator(rest.begin(), rest.end(), hash_ref); it != std::sregex_iterator(); ++it) {
    const auto& qualifier = (*it)[2];
    if (qualifier.matched && lower(qualifier.str()) != self) continue;
    add_number(found, (*it)[3].str());
  }
  for (auto it = std::sregex_iterator(rest.begin(), rest.end(), gh_ref); it != std::sregex_iterator(); ++it) {
    add_number(found, (*it)[2].str());
  }
  return {found.begin(), found.end()};
}

namespace {

template <typename T>
void snapshot_into(const Issue& issue, Timestamp cutoff, T& out) {
  if (cutoff < issue.created_at) {
    fail(ErrorKind::CutoffBeforeCreation, issue.repo + "#" + std::to_string(issue.number) + ": cutoff " + cutoff.iso8601() +
                                              " precedes creation " + issue.created_at.iso8601());
  }
  auto keep = [cutoff](Timestamp at) { return at <= cutoff; };
  std::erase_if(out.comments, [&](const Comment& c) { return !keep(c.created_at); });
  std::erase_if(out.label_events, [&](const LabelEvent& l) { return !keep(l.added_at); });
  std::erase_if(out.timeline_commits, [&](const TimelineCommitRef& r) { return !keep(r.at); });
  std::erase_if(out.cross_references, [&](const TimelineIssueRef& r) { return !keep(r.at); });
}

}  // namespace

Issue snapshot_as_of(const Issue& issue, Timestamp cutoff) {
  Issue out = issue;
  snapshot_into(issue, cutoff, out);
  return out;
}

PullRequest snapshot_as_of(const PullRequest& pull, Timestamp cutoff) {
  PullRequest out = pull;
  snapshot_into(pull, cutoff, out);
  if (out.merged_at && *out.merged_at > cutoff) out.merged_at.reset();
  return out;
}

IssueCommitPair pair_issue_commit(const Issue& issue, const Commit& commit, Timestamp disclosed_at) {
  if (!(issue.created_at < disclosed_at)) {
    fail(ErrorKind::PostDisclosureArtifact, issue.repo + "#" + std::to_string(issue.number) + " created at or after disclosure");
  }
  if (!(commit.authored_at < disclosed_at)) {
    fail(ErrorKind::PostDisclosureArtifact, commit.repo + "@" + commit.sha + " authored at or after disclosure");
  }
  const bool issue_first = issue.created_at <= commit.authored_at;
  const Timestamp cutoff = issue_first ? commit.authored_at : issue.created_at;
  return IssueCommitPair{snapshot_as_of(issue, cutoff), commit, std::max(issue.created_at, commit.authored_at)};
}

}  // namespace pcve::github
