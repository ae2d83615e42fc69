#include "pcve/dataset/builder.hpp"

#include <algorithm>
#include <mutex>
#include <optional>
#include <set>

#include "pcve/common/error.hpp"
#include "pcve/common/hash.hpp"
#include "pcve/common/parallel.hpp"
#include "pcve/github/collect.hpp"
#include "pcve/github/linking.hpp"

namespace pcve::dataset {

ExclusionSet build_exclusions(std::span<const nvd::CveRecord> cves, std::span<const github::CollectedCve> collected) {
  ExclusionSet set;
  for (const auto& cve : cves) {
    for (const auto& ref : cve.references) {
      if (!ref.repo || !ref.locator) continue;
      if (ref.kind == nvd::ReferenceKind::Commit) set.add_commit(*ref.repo, *ref.locator);
      if (ref.kind == nvd::ReferenceKind::Issue || ref.kind == nvd::ReferenceKind::Pull) {
        set.add_issue(*ref.repo, std::stoull(*ref.locator));
      }
    }
  }
  for (const auto& c : collected) {
    for (const auto& linked : c.artifacts) {
      std::visit(
          [&](const auto& a) {
            if constexpr (std::is_same_v<std::decay_t<decltype(a)>, github::Commit>) set.add_commit(a.repo, a.sha);
            else set.add_issue(a.repo, a.number);
          },
          linked.artifact);
    }
  }
  return set;
}

template <typename IssueLike>
IssueLike pair_snapshot(const IssueLike& issue, Timestamp earliest_commit) {
  // Issue first: content as of the commit. Commit first: title and body only.
  if (issue.created_at < earliest_commit) return github::snapshot_as_of(issue, earliest_commit);
  IssueLike out = github::snapshot_as_of(issue, issue.created_at);
  out.comments.clear();
  return out;
}

template github::Issue pair_snapshot(const github::Issue&, Timestamp);
template github::PullRequest pair_snapshot(const github::PullRequest&, Timestamp);

namespace {

struct Partitioned {
  std::vector<github::Issue> issues;
  std::vector<github::PullRequest> pulls;
  std::vector<github::Commit> commits;
};

Partitioned partition(const std::vector<github::LinkedArtifact>& artifacts) {
  Partitioned p;
  for (const auto& linked : artifacts) {
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, github::Issue>) p.issues.push_back(a);
          else if constexpr (std::is_same_v<T, github::PullRequest>) p.pulls.push_back(a);
          else p.commits.push_back(a);
        },
        linked.artifact);
  }
  return p;
}

std::optional<Timestamp> earliest_commit_time(const std::vector<github::Commit>& commits) {
  std::optional<Timestamp> best;
  for (const auto& c : commits) {
    if (!touches_supported_language(c)) continue;
    if (!best || c.authored_at < *best) best = c.authored_at;
  }
  return best;
}

void apply_pair_snapshots(SampleInput& input) {
  auto anchor = earliest_commit_time(input.commits);
  if (!anchor) return;
  for (auto& i : input.issues) i = pair_snapshot(i, *anchor);
  for (auto& p : input.pulls) p = pair_snapshot(p, *anchor);
}

struct CveOutcome {
  std::vector<DetectionSample> samples;
  std::optional<std::string> excluded;
  std::size_t dropped = 0;
  bool shortfall = false;
};

class NonVulnDrawer {
public:
  NonVulnDrawer(github::ArtifactSource& source, const ExclusionSet& exclusions, const BuildOptions& options)
      : source_(source), exclusions_(exclusions), options_(options) {}

  // k commits around `anchor`, each touching a supported language. The whole
  // eligible pool is permuted under the seed and walked in that order, which
  // is a uniform draw among the supported commits.
  std::vector<github::Commit> commits(const std::string& repo, Timestamp anchor, const std::string& label, bool& shortfall) {
    WindowOptions all = options_.window;
    auto window = github::list_repo_commits(repo, anchor.plus_days(-all.half_window_days), anchor.plus_days(all.half_window_days), source_);
    all.k = std::max<std::size_t>(1, window.size());
    auto order = sample_non_vulnerable(window, repo, anchor, exclusions_, all, derive_seed(options_.seed, "commit:" + label));
    std::vector<github::Commit> out;
    for (const auto& sha : order) {
      if (out.size() == options_.window.k) break;
      if (taken_.contains(repo + "@" + sha)) continue;
      auto commit = fetch_quietly([&] { return source_.fetch_commit(repo, sha); });
      if (!commit || !touches_supported_language(*commit)) continue;
      taken_.insert(repo + "@" + sha);
      out.push_back(std::move(*commit));
    }
    if (out.size() < options_.window.k) shortfall = true;
    return out;
  }

  void discussions(const std::string& repo, Timestamp anchor, const std::string& label, SampleInput& into, bool& shortfall) {
    WindowOptions all = options_.window;
    auto window = source_.list_issues(repo, anchor.plus_days(-all.half_window_days), anchor.plus_days(all.half_window_days));
    std::sort(window.begin(), window.end(), [](const auto& a, const auto& b) { return a.number < b.number; });
    all.k = std::max<std::size_t>(1, window.size());
    auto order = sample_non_vulnerable_issues(window, repo, anchor, exclusions_, all, derive_seed(options_.seed, "issue:" + label));
    std::size_t got = 0;
    for (const auto& shallow : order) {
      if (got == options_.window.k) break;
      if (!taken_.insert(repo + "#" + std::to_string(shallow.number)).second) continue;
      if (shallow.is_pull_request) {
        auto pull = fetch_quietly([&] { return source_.fetch_pull(repo, shallow.number); });
        if (!pull) continue;
        into.pulls.push_back(std::move(*pull));
      } else {
        auto issue = fetch_quietly([&] { return source_.fetch_issue(repo, shallow.number); });
        if (!issue) continue;
        into.issues.push_back(std::move(*issue));
      }
      ++got;
    }
    if (got < options_.window.k) shortfall = true;
  }

private:
  template <typename Fetch>
  static auto fetch_quietly(Fetch&& fetch) -> std::optional<decltype(fetch())> {
    try {
      return fetch();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NotFound) return std::nullopt;
      throw;
    }
  }

  github::ArtifactSource& source_;
  const ExclusionSet& exclusions_;
  const BuildOptions& options_;
  std::set<std::string> taken_;
};

CveOutcome build_for_cve(const nvd::CveRecord& cve, const github::CollectedCve& collected, github::ArtifactSource& source,
                         const ExclusionSet& exclusions, const BuildOptions& options) {
  CveOutcome out;
  std::vector<github::LinkedArtifact> kept;
  for (const auto& linked : collected.artifacts) {
    if (github::artifact_time(linked.artifact) < cve.disclosed_at) kept.push_back(linked);
    else ++out.dropped;
  }
  auto parts = partition(kept);
  SampleInput vuln_input{std::move(parts.issues), std::move(parts.pulls), std::move(parts.commits)};
  apply_pair_snapshots(vuln_input);

  DetectionSample vuln;
  try {
    vuln = build_sample(cve, std::move(vuln_input), Label::Vuln, options.disclosure_guard);
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::MissingCommit:
      case ErrorKind::MissingDiscussion:
      case ErrorKind::UnsupportedLanguageOnly:
      case ErrorKind::PostDisclosureArtifact:
        out.excluded = std::string(to_string(e.kind()));
        return out;
      default:
        throw;
    }
  }

  // Five non-vulnerable artifacts per vulnerable one, each drawn around that
  // artifact's own creation time.
  NonVulnDrawer drawer(source, exclusions, options);
  SampleInput nv_input;
  for (const auto& c : vuln.commits) {
    auto picks = drawer.commits(c.repo, c.authored_at, cve.cve_id + "/" + c.sha, out.shortfall);
    std::move(picks.begin(), picks.end(), std::back_inserter(nv_input.commits));
  }
  for (const auto& i : vuln.issues) {
    drawer.discussions(i.repo, i.created_at, cve.cve_id + "/" + std::to_string(i.number), nv_input, out.shortfall);
  }
  for (const auto& p : vuln.pulls) {
    drawer.discussions(p.repo, p.created_at, cve.cve_id + "/" + std::to_string(p.number), nv_input, out.shortfall);
  }
  apply_pair_snapshots(nv_input);
  out.samples.push_back(std::move(vuln));
  try {
    out.samples.push_back(build_sample(cve, std::move(nv_input), Label::NonVuln, false));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::MissingCommit && e.kind() != ErrorKind::MissingDiscussion &&
        e.kind() != ErrorKind::UnsupportedLanguageOnly) {
      throw;
    }
    out.shortfall = true;
  }
  return out;
}

}  // namespace

BuildResult build_dataset(std::span<const nvd::CveRecord> cves, std::span<const github::CollectedCve> collected,
                          github::ArtifactSource& source, const ExclusionSet& exclusions, const BuildOptions& options) {
  std::map<std::string, const github::CollectedCve*> by_id;
  for (const auto& c : collected) by_id[c.cve_id] = &c;

  std::vector<const nvd::CveRecord*> ordered;
  for (const auto& cve : cves) ordered.push_back(&cve);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->cve_id < b->cve_id; });

  const github::CollectedCve empty;
  std::vector<CveOutcome> outcomes(ordered.size());
  parallel_for(ordered.size(), options.parallelism, [&](std::size_t i) {
    auto it = by_id.find(ordered[i]->cve_id);
    outcomes[i] = build_for_cve(*ordered[i], it == by_id.end() ? empty : *it->second, source, exclusions, options);
  });

  BuildResult result;
  result.report.cves_considered = ordered.size();
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    auto& o = outcomes[i];
    result.report.post_disclosure_artifacts_dropped += o.dropped;
    if (o.excluded) ++result.report.excluded[*o.excluded];
    if (o.shortfall) result.report.shortfalls.push_back(ordered[i]->cve_id);
    for (auto& s : o.samples) {
      ++(s.label == Label::Vuln ? result.report.vuln_samples : result.report.non_vuln_samples);
      result.samples.push_back(std::move(s));
    }
  }
  return result;
}

Json to_json(const BuildReport& r) {
  Json excluded = Json::object();
  for (const auto& [k, v] : r.excluded) excluded[k] = v;
  return Json{{"cves_considered", r.cves_considered},
              {"vuln_samples", r.vuln_samples},
              {"non_vuln_samples", r.non_vuln_samples},
              {"post_disclosure_artifacts_dropped", r.post_disclosure_artifacts_dropped},
              {"excluded", std::move(excluded)},
              {"shortfalls", r.shortfalls}};
}

}  // namespace pcve::dataset
