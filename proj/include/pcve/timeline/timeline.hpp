#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcve/common/io.hpp"
#include "pcve/common/time.hpp"
#include "pcve/github/artifacts.hpp"
#include "pcve/nvd/cve_record.hpp"

namespace pcve::timeline {

enum class LifecycleType { PatchDiscloseOnly, ReportDiscloseOnly, CvdOrdered, DisclosedBeforePatch, SilentFix };

inline constexpr LifecycleType kAllLifecycles[] = {LifecycleType::PatchDiscloseOnly, LifecycleType::ReportDiscloseOnly,
                                                   LifecycleType::CvdOrdered, LifecycleType::DisclosedBeforePatch,
                                                   LifecycleType::SilentFix};

std::string_view to_string(LifecycleType type);
LifecycleType lifecycle_from_string(std::string_view text);

struct VulnTimeline {
  std::string cve_id;
  std::optional<Timestamp> t_report;
  std::optional<Timestamp> t_patch;
  Timestamp t_disclose;
  Timestamp t_earliest;
  std::int64_t delta_t_days = 0;
  LifecycleType lifecycle = LifecycleType::PatchDiscloseOnly;

  friend bool operator==(const VulnTimeline&, const VulnTimeline&) = default;
};

// Throws NoArtifacts on an empty list and NegativeDelta when every artifact
// postdates disclosure.
VulnTimeline resolve_timestamps(const nvd::CveRecord& cve, std::span<const github::LinkedArtifact> artifacts);

std::int64_t compute_delta_t(Timestamp t_earliest, Timestamp t_disclose);
std::int64_t compute_delta_t(const VulnTimeline& timeline);

bool is_pcve(const VulnTimeline& timeline, std::int64_t threshold_days = 365);

LifecycleType classify_lifecycle(std::optional<Timestamp> t_report, std::optional<Timestamp> t_patch, Timestamp t_disclose);

struct DeltaStats {
  double mean = 0;
  double p25 = 0;
  double median = 0;
  double p75 = 0;
  double p90 = 0;
  double p95 = 0;
};

// Nearest-rank percentile: the element at 1-based rank ceil(p * N).
double nearest_rank(std::span<const std::int64_t> sorted, double p);
DeltaStats delta_stats(std::span<const std::int64_t> deltas);

int cochran_sample_size(std::int64_t population, double confidence, double margin);
double z_score(double confidence);

// Buckets [floor + w*k, floor + w*(k+1)) for k < buckets - 1; the last is open-ended.
struct StrataSpec {
  std::int64_t floor_days = 365;
  std::int64_t width_days = 90;
  int buckets = 9;
};

int stratum_of(std::int64_t delta_t_days, const StrataSpec& spec = {});
// Largest-remainder allocation of total_n across strata of the given sizes;
// equal remainders go to the lower stratum.
std::vector<std::size_t> allocate_strata(std::span<const std::size_t> sizes, std::size_t total_n);
std::vector<VulnTimeline> stratified_sample(std::span<const VulnTimeline> pcves, std::size_t total_n, std::uint64_t seed,
                                            const StrataSpec& spec = {});

enum class DelayReason {
  DelayedNvdDisclosure,
  MisjudgedSeverity,
  LackOfMaintenance,
  IncompleteFix,
  DisagreementOnResolution,
  OtherUnknown,
  ResourceConstraints,
  LackOfExpertise,
};

std::string_view to_string(DelayReason reason);
DelayReason delay_reason_from_string(std::string_view text);

struct DelayAnnotation {
  std::string cve_id;
  std::vector<DelayReason> reasons;  // sorted, unique, non-empty
  std::string notes;
};

Json to_json(const VulnTimeline& timeline);
VulnTimeline timeline_from_json(const Json& row);
Json to_json(const DelayAnnotation& annotation);
DelayAnnotation delay_annotation_from_json(const Json& row);

std::vector<DelayAnnotation> read_annotations(const std::string& path);
void write_annotations(const std::string& path, std::span<const DelayAnnotation> annotations);

std::string delta_stats_csv(const DeltaStats& stats);
// One row per lifecycle type with its count and the mean/median gaps between
// the timestamps it has.
std::string lifecycle_counts_csv(std::span<const VulnTimeline> timelines);

}  // namespace pcve::timeline
