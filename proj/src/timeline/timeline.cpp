#include "pcve/timeline/timeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pcve/common/error.hpp"
#include "pcve/common/random.hpp"

namespace pcve::timeline {

std::string_view to_string(LifecycleType type) {
  switch (type) {
    case LifecycleType::PatchDiscloseOnly: return "PatchDiscloseOnly";
    case LifecycleType::ReportDiscloseOnly: return "ReportDiscloseOnly";
    case LifecycleType::CvdOrdered: return "CvdOrdered";
    case LifecycleType::DisclosedBeforePatch: return "DisclosedBeforePatch";
    case LifecycleType::SilentFix: return "SilentFix";
  }
  return "?";
}

LifecycleType lifecycle_from_string(std::string_view text) {
  for (auto t : kAllLifecycles) {
    if (to_string(t) == text) return t;
  }
  fail(ErrorKind::MalformedRecord, "unknown lifecycle type: " + std::string(text));
}

namespace {

void keep_min(std::optional<Timestamp>& slot, Timestamp t) {
  if (!slot || t < *slot) slot = t;
}

}  // namespace

VulnTimeline resolve_timestamps(const nvd::CveRecord& cve, std::span<const github::LinkedArtifact> artifacts) {
  if (artifacts.empty()) fail(ErrorKind::NoArtifacts, cve.cve_id + " has no linked artifacts");

  std::optional<Timestamp> report, nvd_commit, merged, other_commit, earliest;
  for (const auto& linked : artifacts) {
    keep_min(earliest, github::artifact_time(linked.artifact));
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, github::Commit>) {
            if (linked.origin == github::ArtifactOrigin::NvdReference) keep_min(nvd_commit, a.authored_at);
            else keep_min(other_commit, a.authored_at);
          } else {
            keep_min(report, a.created_at);
            if constexpr (std::is_same_v<T, github::PullRequest>) {
              if (a.merged_at) keep_min(merged, *a.merged_at);
            }
          }
        },
        linked.artifact);
  }

  VulnTimeline out;
  out.cve_id = cve.cve_id;
  out.t_report = report;
  out.t_patch = nvd_commit ? nvd_commit : merged ? merged : other_commit;
  out.t_disclose = cve.disclosed_at;
  out.t_earliest = *earliest;
  out.delta_t_days = compute_delta_t(out.t_earliest, out.t_disclose);
  out.lifecycle = classify_lifecycle(out.t_report, out.t_patch, out.t_disclose);
  return out;
}

std::int64_t compute_delta_t(Timestamp t_earliest, Timestamp t_disclose) {
  if (t_disclose < t_earliest) {
    fail(ErrorKind::NegativeDelta, "earliest artifact " + t_earliest.iso8601() + " is after disclosure " + t_disclose.iso8601());
  }
  return floor_days_between(t_earliest, t_disclose);
}

std::int64_t compute_delta_t(const VulnTimeline& timeline) { return compute_delta_t(timeline.t_earliest, timeline.t_disclose); }

bool is_pcve(const VulnTimeline& timeline, std::int64_t threshold_days) { return timeline.delta_t_days >= threshold_days; }

LifecycleType classify_lifecycle(std::optional<Timestamp> t_report, std::optional<Timestamp> t_patch, Timestamp t_disclose) {
  if (!t_report && !t_patch) fail(ErrorKind::InsufficientTimestamps, "neither a report nor a patch timestamp");
  if (!t_report) return LifecycleType::PatchDiscloseOnly;
  if (!t_patch) return LifecycleType::ReportDiscloseOnly;
  // Patch before report wins even when the patch also trails disclosure.
  if (*t_patch < *t_report) return LifecycleType::SilentFix;
  if (t_disclose < *t_patch) return LifecycleType::DisclosedBeforePatch;
  return LifecycleType::CvdOrdered;
}

double nearest_rank(std::span<const std::int64_t> sorted, double p) {
  if (sorted.empty()) fail(ErrorKind::EmptyInput, "percentile of an empty list");
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return static_cast<double>(sorted[rank - 1]);
}

DeltaStats delta_stats(std::span<const std::int64_t> deltas) {
  if (deltas.empty()) fail(ErrorKind::EmptyInput, "delta_stats needs at least one value");
  std::vector<std::int64_t> sorted(deltas.begin(), deltas.end());
  std::sort(sorted.begin(), sorted.end());
  long double sum = 0;
  for (auto d : sorted) sum += d;
  DeltaStats s;
  s.mean = static_cast<double>(sum / static_cast<long double>(sorted.size()));
  s.p25 = nearest_rank(sorted, 0.25);
  s.median = nearest_rank(sorted, 0.50);
  s.p75 = nearest_rank(sorted, 0.75);
  s.p90 = nearest_rank(sorted, 0.90);
  s.p95 = nearest_rank(sorted, 0.95);
  return s;
}

double z_score(double confidence) {
  if (std::abs(confidence - 0.90) < 1e-9) return 1.645;
  if (std::abs(confidence - 0.95) < 1e-9) return 1.96;
  if (std::abs(confidence - 0.99) < 1e-9) return 2.576;
  fail(ErrorKind::InvalidArgument, "confidence must be 0.90, 0.95 or 0.99");
}

int cochran_sample_size(std::int64_t population, double confidence, double margin) {
  if (population < 1) fail(ErrorKind::InvalidArgument, "population must be at least 1");
  if (!(margin > 0 && margin < 1)) fail(ErrorKind::InvalidArgument, "margin must lie in (0, 1)");
  double z = z_score(confidence);
  double n0 = z * z * 0.25 / (margin * margin);
  double n = n0 / (1.0 + (n0 - 1.0) / static_cast<double>(population));
  auto size = static_cast<std::int64_t>(std::ceil(n - 1e-9));
  return static_cast<int>(std::clamp<std::int64_t>(size, 1, population));
}

int stratum_of(std::int64_t delta_t_days, const StrataSpec& spec) {
  if (spec.buckets < 1 || spec.width_days < 1) fail(ErrorKind::ConfigInvalid, "strata need a positive count and width");
  if (delta_t_days < spec.floor_days) fail(ErrorKind::InvalidArgument, "delta below the stratification floor");
  return static_cast<int>(std::min<std::int64_t>(spec.buckets - 1, (delta_t_days - spec.floor_days) / spec.width_days));
}

std::vector<std::size_t> allocate_strata(std::span<const std::size_t> sizes, std::size_t total_n) {
  std::size_t population = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (total_n > population) fail(ErrorKind::InsufficientPopulation, "requested more samples than the population holds");
  std::vector<std::size_t> alloc(sizes.size(), 0);
  if (population == 0) return alloc;
  // Exact integer quotas: floor(total_n * size / population), remainders ranked.
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder, index)
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    std::size_t num = total_n * sizes[i];
    alloc[i] = num / population;
    assigned += alloc[i];
    remainders.emplace_back(num % population, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total_n; ++k) {
    std::size_t i = remainders[k].second;
    if (alloc[i] < sizes[i]) {
      ++alloc[i];
      ++assigned;
    }
  }
  return alloc;
}

std::vector<VulnTimeline> stratified_sample(std::span<const VulnTimeline> pcves, std::size_t total_n, std::uint64_t seed,
                                            const StrataSpec& spec) {
  if (total_n > pcves.size()) fail(ErrorKind::InsufficientPopulation, "requested more samples than PCVEs available");
  std::vector<std::vector<const VulnTimeline*>> buckets(static_cast<std::size_t>(std::max(1, spec.buckets)));
  for (const auto& t : pcves) buckets[static_cast<std::size_t>(stratum_of(t.delta_t_days, spec))].push_back(&t);
  std::vector<std::size_t> sizes;
  for (auto& b : buckets) {
    std::sort(b.begin(), b.end(), [](auto* x, auto* y) { return x->cve_id < y->cve_id; });
    sizes.push_back(b.size());
  }
  auto alloc = allocate_strata(sizes, total_n);
  Rng rng(seed);
  std::vector<VulnTimeline> out;
  for (std::size_t k = 0; k < buckets.size(); ++k) {
    for (auto idx : rng.sample_indices(buckets[k].size(), alloc[k])) out.push_back(*buckets[k][idx]);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.cve_id < b.cve_id; });
  return out;
}

namespace {

constexpr std::array<std::pair<DelayReason, std::string_view>, 8> kReasonNames{{
    {DelayReason::DelayedNvdDisclosure, "DelayedNvdDisclosure"},
    {DelayReason::MisjudgedSeverity, "MisjudgedSeverity"},
    {DelayReason::LackOfMaintenance, "LackOfMaintenance"},
    {DelayReason::IncompleteFix, "IncompleteFix"},
    {DelayReason::DisagreementOnResolution, "DisagreementOnResolution"},
    {DelayReason::OtherUnknown, "OtherUnknown"},
    {DelayReason::ResourceConstraints, "ResourceConstraints"},
    {DelayReason::LackOfExpertise, "LackOfExpertise"},
}};

Json optional_time(const std::optional<Timestamp>& t) { return t ? Json(t->iso8601()) : Json(nullptr); }

std::optional<Timestamp> read_optional_time(const Json& row, const char* key) {
  if (!row.contains(key) || row.at(key).is_null()) return std::nullopt;
  return Timestamp::parse(row.at(key).get<std::string>());
}

}  // namespace

std::string_view to_string(DelayReason reason) {
  for (const auto& [r, name] : kReasonNames) {
    if (r == reason) return name;
  }
  return "?";
}

DelayReason delay_reason_from_string(std::string_view text) {
  for (const auto& [r, name] : kReasonNames) {
    if (name == text) return r;
  }
  fail(ErrorKind::MalformedRecord, "unknown delay reason: " + std::string(text));
}

Json to_json(const VulnTimeline& t) {
  return Json{{"cve_id", t.cve_id},
              {"t_report", optional_time(t.t_report)},
              {"t_patch", optional_time(t.t_patch)},
              {"t_disclose", t.t_disclose.iso8601()},
              {"t_earliest", t.t_earliest.iso8601()},
              {"delta_t_days", t.delta_t_days},
              {"lifecycle", std::string(to_string(t.lifecycle))}};
}

VulnTimeline timeline_from_json(const Json& row) {
  try {
    VulnTimeline t;
    t.cve_id = row.at("cve_id").get<std::string>();
    t.t_report = read_optional_time(row, "t_report");
    t.t_patch = read_optional_time(row, "t_patch");
    t.t_disclose = Timestamp::parse(row.at("t_disclose").get<std::string>());
    t.t_earliest = Timestamp::parse(row.at("t_earliest").get<std::string>());
    t.delta_t_days = row.at("delta_t_days").get<std::int64_t>();
    t.lifecycle = lifecycle_from_string(row.at("lifecycle").get<std::string>());
    return t;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedRecord, std::string("timeline row: ") + e.what());
  }
}

Json to_json(const DelayAnnotation& a) {
  Json reasons = Json::array();
  for (auto r : a.reasons) reasons.push_back(std::string(to_string(r)));
  return Json{{"cve_id", a.cve_id}, {"reasons", std::move(reasons)}, {"notes", a.notes}};
}

DelayAnnotation delay_annotation_from_json(const Json& row) {
  DelayAnnotation a;
  try {
    a.cve_id = row.at("cve_id").get<std::string>();
    for (const auto& r : row.at("reasons")) a.reasons.push_back(delay_reason_from_string(r.get<std::string>()));
    a.notes = row.value("notes", std::string{});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedRecord, std::string("annotation row: ") + e.what());
  }
  if (a.reasons.empty()) fail(ErrorKind::MalformedRecord, a.cve_id + " annotation has no reasons");
  std::sort(a.reasons.begin(), a.reasons.end());
  a.reasons.erase(std::unique(a.reasons.begin(), a.reasons.end()), a.reasons.end());
  return a;
}

std::vector<DelayAnnotation> read_annotations(const std::string& path) {
  std::vector<DelayAnnotation> out;
  for (const auto& row : read_jsonl(path)) out.push_back(delay_annotation_from_json(row));
  return out;
}

void write_annotations(const std::string& path, std::span<const DelayAnnotation> annotations) {
  std::vector<Json> rows;
  for (const auto& a : annotations) {
    if (a.reasons.empty()) fail(ErrorKind::InvalidArgument, a.cve_id + " annotation has no reasons");
    rows.push_back(to_json(a));
  }
  write_jsonl_atomic(path, rows);
}

std::string delta_stats_csv(const DeltaStats& s) {
  std::string out = "statistic,days\n";
  out += "mean," + format_fixed(s.mean, 1) + "\n";
  out += "p25," + format_fixed(s.p25, 0) + "\n";
  out += "median," + format_fixed(s.median, 0) + "\n";
  out += "p75," + format_fixed(s.p75, 0) + "\n";
  out += "p90," + format_fixed(s.p90, 0) + "\n";
  out += "p95," + format_fixed(s.p95, 0) + "\n";
  return out;
}

namespace {

std::string gap_summary(std::vector<std::int64_t> gaps) {
  if (gaps.empty()) return ",";
  auto s = delta_stats(gaps);
  return format_fixed(s.mean, 1) + "," + format_fixed(s.median, 0);
}

}  // namespace

std::string lifecycle_counts_csv(std::span<const VulnTimeline> timelines) {
  std::string out =
      "lifecycle,count,mean_report_to_patch,median_report_to_patch,mean_patch_to_disclose,median_patch_to_disclose,"
      "mean_report_to_disclose,median_report_to_disclose\n";
  for (auto type : kAllLifecycles) {
    std::size_t count = 0;
    std::vector<std::int64_t> rp, pd, rd;
    for (const auto& t : timelines) {
      if (t.lifecycle != type) continue;
      ++count;
      // Signed gaps: negative values are meaningful for silent fixes and late patches.
      auto span_days = [](Timestamp a, Timestamp b) { return b < a ? -floor_days_between(b, a) : floor_days_between(a, b); };
      if (t.t_report && t.t_patch) rp.push_back(std::abs(span_days(*t.t_report, *t.t_patch)));
      if (t.t_patch) pd.push_back(span_days(*t.t_patch, t.t_disclose));
      if (t.t_report) rd.push_back(span_days(*t.t_report, t.t_disclose));
    }
    out += std::string(to_string(type)) + "," + std::to_string(count) + "," + gap_summary(rp) + "," + gap_summary(pd) + "," +
           gap_summary(rd) + "\n";
  }
  return out;
}

}  // namespace pcve::timeline
