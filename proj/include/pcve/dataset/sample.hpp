#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcve/common/io.hpp"
#include "pcve/dataset/language.hpp"
#include "pcve/github/artifacts.hpp"
#include "pcve/nvd/cve_record.hpp"

namespace pcve::dataset {

enum class Label { Vuln, NonVuln };

std::string_view to_string(Label label);
Label label_from_string(std::string_view text);

struct DetectionSample {
  std::string sample_id;
  std::optional<std::string> cve_id;  // Vuln only
  std::string anchor_cve_id;          // the CVE this sample was built around
  Label label = Label::Vuln;
  std::vector<github::Issue> issues;
  std::vector<github::PullRequest> pulls;
  std::vector<github::Commit> commits;  // supported-language commits only
  Language dominant_language = Language::C;
  int era = 0;  // disclosure year of the anchor CVE

  friend bool operator==(const DetectionSample&, const DetectionSample&) = default;
};

std::string vuln_sample_id(const std::string& cve_id);
std::string non_vuln_sample_id(const std::string& cve_id);

// Plurality language over changed supported files; ties prefer C, then Cpp,
// then Java. Nullopt when no supported file is touched.
std::optional<Language> dominant_language(std::span<const github::Commit> commits);
bool touches_supported_language(const github::Commit& commit);

struct SampleInput {
  std::vector<github::Issue> issues;
  std::vector<github::PullRequest> pulls;
  std::vector<github::Commit> commits;
};

// Checks, in order: MissingCommit, MissingDiscussion, PostDisclosureArtifact
// (when the guard is on), UnsupportedLanguageOnly. Commits that touch no
// supported language are dropped from the sample.
DetectionSample build_sample(const nvd::CveRecord& cve, SampleInput artifacts, Label label, bool disclosure_guard);

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct SplitManifest {
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;
  std::vector<std::string> test_ids;
  // Post-boundary samples beyond the test quota; they cannot enter train/val.
  std::vector<std::string> unassigned_ids;
  int boundary_year = 2020;
  std::uint64_t seed = 0;
  std::string boundary_policy;

  friend bool operator==(const SplitManifest&, const SplitManifest&) = default;
};

// Test takes round(test * N) samples: era > boundary first, then boundary-year
// samples to fill the quota. Val takes round(val * N) from what is left with
// era <= boundary; train takes the rest. Draws are label-stratified and
// seeded. Throws EmptyEra when no sample has era >= boundary.
SplitManifest split_dataset(std::span<const DetectionSample> samples, const SplitRatios& ratios, int boundary_year,
                            std::uint64_t seed);

Json to_json(const DetectionSample& sample);
DetectionSample detection_sample_from_json(const Json& row);
Json to_json(const SplitManifest& manifest);
SplitManifest split_manifest_from_json(const Json& row);

std::vector<DetectionSample> read_dataset(const std::string& path);

}  // namespace pcve::dataset
