#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pcve/common/io.hpp"
#include "pcve/dataset/sample.hpp"
#include "pcve/dataset/sampler.hpp"
#include "pcve/github/client.hpp"
#include "pcve/github/collect.hpp"
#include "pcve/nvd/cve_record.hpp"

namespace pcve::dataset {

struct BuildOptions {
  WindowOptions window;
  std::uint64_t seed = 0;
  std::size_t parallelism = 8;
  bool disclosure_guard = true;
};

struct BuildReport {
  std::size_t cves_considered = 0;
  std::size_t vuln_samples = 0;
  std::size_t non_vuln_samples = 0;
  std::size_t post_disclosure_artifacts_dropped = 0;
  std::map<std::string, std::size_t> excluded;  // error kind -> CVE count
  std::vector<std::string> shortfalls;          // anchors with fewer than k picks somewhere
};

struct BuildResult {
  std::vector<DetectionSample> samples;  // ordered by anchor CVE, Vuln before NonVuln
  BuildReport report;
};

// Every commit and issue the CVE corpus links to, plus everything collected.
ExclusionSet build_exclusions(std::span<const nvd::CveRecord> cves, std::span<const github::CollectedCve> collected);

// Restricts each issue/PR to what was visible when it was linked with the
// sample's earliest commit.
template <typename IssueLike>
IssueLike pair_snapshot(const IssueLike& issue, Timestamp earliest_commit);

BuildResult build_dataset(std::span<const nvd::CveRecord> cves, std::span<const github::CollectedCve> collected,
                          github::ArtifactSource& source, const ExclusionSet& exclusions, const BuildOptions& options);

Json to_json(const BuildReport& report);

}  // namespace pcve::dataset
