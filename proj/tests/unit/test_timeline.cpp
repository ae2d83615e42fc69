#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "corpus.hpp"
#include "fake_source.hpp"
#include "pcve/common/random.hpp"
#include "pcve/timeline/timeline.hpp"

using namespace pcve;
using namespace pcve::timeline;
using testing::make_commit;
using testing::make_issue;
using testing::sha_of;

namespace {

// Fliegel & Van Flandern day number, independent of <chrono>.
long julian_day(long y, long m, long d) {
  return (1461 * (y + 4800 + (m - 14) / 12)) / 4 + (367 * (m - 2 - 12 * ((m - 14) / 12))) / 12 -
         (3 * ((y + 4900 + (m - 14) / 12) / 100)) / 4 + d - 32075;
}

int cochran_oracle(long n, double z, double e) {
  long double n0 = static_cast<long double>(z) * z * 0.25L / (static_cast<long double>(e) * e);
  long double adj = n0 / (1.0L + (n0 - 1.0L) / n);
  return static_cast<int>(std::ceil(adj - 1e-12L));
}

std::optional<Timestamp> opt_ts(const Json& v) {
  if (v.is_null()) return std::nullopt;
  return Timestamp::parse(v.get<std::string>());
}

nvd::CveRecord cve_at(const std::string& id, const std::string& disclosed) {
  nvd::CveRecord r;
  r.cve_id = id;
  r.disclosed_at = Timestamp::parse(disclosed);
  return r;
}

VulnTimeline tl(const std::string& id, std::int64_t delta) {
  VulnTimeline t;
  t.cve_id = id;
  t.t_disclose = Timestamp::from_date(2022, 1, 1);
  t.t_earliest = t.t_disclose.plus_days(-delta);
  t.t_patch = t.t_earliest;
  t.delta_t_days = delta;
  return t;
}

}  // namespace

TEST_CASE("lifecycle fixture classifies exactly") {
  auto cases = parse_json(read_file(PCVE_TEST_FIXTURES "/lifecycle_cases.json"), "lifecycle cases");
  REQUIRE(cases.size() == 12);
  std::map<std::string, int> covered;
  for (const auto& c : cases) {
    INFO(c["name"].get<std::string>());
    auto got = classify_lifecycle(opt_ts(c["report"]), opt_ts(c["patch"]), Timestamp::parse(c["disclose"].get<std::string>()));
    CHECK(to_string(got) == c["expected"].get<std::string>());
    ++covered[c["expected"].get<std::string>()];
  }
  CHECK(covered.size() == 5);
  CHECK_THROWS_AS(classify_lifecycle(std::nullopt, std::nullopt, Timestamp::from_date(2020, 1, 1)), Error);
  for (auto t : kAllLifecycles) CHECK(lifecycle_from_string(to_string(t)) == t);
}

TEST_CASE("delta matches a calendar oracle") {
  auto d = compute_delta_t(Timestamp::from_date(2015, 9, 17), Timestamp::from_date(2019, 7, 15));
  CHECK(d == julian_day(2019, 7, 15) - julian_day(2015, 9, 17));
  CHECK(d == 1397);
  CHECK(compute_delta_t(Timestamp::from_date(2020, 1, 1), Timestamp::from_date(2020, 1, 1)) == 0);
  // a 203-day patch delay followed by a 904-day disclosure delay
  auto report = Timestamp::from_date(2018, 3, 3);
  CHECK(compute_delta_t(report, report.plus_days(203).plus_days(904)) == 1107);
  CHECK_THROWS_AS(compute_delta_t(Timestamp::from_date(2020, 1, 2), Timestamp::from_date(2020, 1, 1)), Error);

  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    long y1 = 1990 + static_cast<long>(rng.index(40)), m1 = 1 + static_cast<long>(rng.index(12)), d1 = 1 + static_cast<long>(rng.index(28));
    long y2 = y1 + static_cast<long>(rng.index(10)), m2 = 1 + static_cast<long>(rng.index(12)), d2 = 1 + static_cast<long>(rng.index(28));
    auto a = Timestamp::from_date(static_cast<int>(y1), static_cast<unsigned>(m1), static_cast<unsigned>(d1));
    auto b = Timestamp::from_date(static_cast<int>(y2), static_cast<unsigned>(m2), static_cast<unsigned>(d2));
    if (b < a) continue;
    CHECK(compute_delta_t(a, b) == julian_day(y2, m2, d2) - julian_day(y1, m1, d1));
  }
}

TEST_CASE("pcve threshold is inclusive") {
  CHECK(is_pcve(tl("CVE-2020-0001", 365)));
  CHECK_FALSE(is_pcve(tl("CVE-2020-0001", 364)));
  CHECK(is_pcve(tl("CVE-2020-0001", 1397)));
  CHECK(is_pcve(tl("CVE-2020-0001", 10), 10));
}

TEST_CASE("resolve_timestamps picks report, patch and earliest") {
  const std::string repo = "o/r";
  auto cve = cve_at("CVE-2022-0001", "2022-01-01");
  auto issue = make_issue(repo, 1, Timestamp::parse("2020-01-01"));
  auto commit = make_commit(repo, sha_of(1), Timestamp::parse("2020-02-01"));
  auto linked_commit = make_commit(repo, sha_of(2), Timestamp::parse("2019-06-01"));
  std::vector<github::LinkedArtifact> arts{{github::ArtifactOrigin::NvdReference, issue},
                                           {github::ArtifactOrigin::NvdReference, commit},
                                           {github::ArtifactOrigin::TimelineReference, linked_commit}};
  auto t = resolve_timestamps(cve, arts);
  CHECK(t.t_report == issue.created_at);
  CHECK(t.t_patch == commit.authored_at);  // NVD-referenced fix wins over a linked commit
  CHECK(t.t_earliest == linked_commit.authored_at);
  CHECK(t.delta_t_days == compute_delta_t(linked_commit.authored_at, cve.disclosed_at));
  CHECK(t.lifecycle == LifecycleType::CvdOrdered);

  std::vector<github::LinkedArtifact> commits_only{{github::ArtifactOrigin::NvdReference, commit}};
  CHECK(resolve_timestamps(cve, commits_only).lifecycle == LifecycleType::PatchDiscloseOnly);
  std::vector<github::LinkedArtifact> issues_only{{github::ArtifactOrigin::NvdReference, issue}};
  auto io = resolve_timestamps(cve, issues_only);
  CHECK(io.lifecycle == LifecycleType::ReportDiscloseOnly);
  CHECK_FALSE(io.t_patch.has_value());

  github::PullRequest pr;
  static_cast<github::Issue&>(pr) = make_issue(repo, 2, Timestamp::parse("2020-03-01"));
  pr.merged_at = Timestamp::parse("2020-03-05");
  std::vector<github::LinkedArtifact> pr_only{{github::ArtifactOrigin::NvdReference, pr}};
  CHECK(resolve_timestamps(cve, pr_only).t_patch == pr.merged_at);

  CHECK_THROWS_AS(resolve_timestamps(cve, {}), Error);
  std::vector<github::LinkedArtifact> late{{github::ArtifactOrigin::NvdReference, make_commit(repo, sha_of(3), Timestamp::parse("2023-01-01"))}};
  try {
    resolve_timestamps(cve, late);
    FAIL("expected NegativeDelta");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NegativeDelta);
  }
}

TEST_CASE("nearest-rank statistics") {
  std::vector<std::int64_t> a{1, 2, 3};
  auto s = delta_stats(a);
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.median == 2);
  std::vector<std::int64_t> b{10, 10, 10, 10};
  auto sb = delta_stats(b);
  CHECK(sb.p25 == 10);
  CHECK(sb.p95 == 10);
  std::vector<std::int64_t> c;
  for (int i = 1; i <= 20; ++i) c.push_back(i);
  CHECK(nearest_rank(c, 0.25) == 5);
  CHECK(nearest_rank(c, 0.5) == 10);
  CHECK(nearest_rank(c, 0.95) == 19);
  CHECK(nearest_rank(c, 0.0) == 1);
  CHECK(nearest_rank(c, 1.0) == 20);
  CHECK_THROWS_AS(delta_stats(std::vector<std::int64_t>{}), Error);

  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int64_t> v(1 + rng.index(60));
    for (auto& x : v) x = static_cast<std::int64_t>(rng.index(3000));
    auto st = delta_stats(v);
    CHECK(st.p25 <= st.median);
    CHECK(st.median <= st.p75);
    CHECK(st.p75 <= st.p90);
    CHECK(st.p90 <= st.p95);
  }
  CHECK(delta_stats_csv(s).rfind("statistic,days\n", 0) == 0);
}

TEST_CASE("cochran sizing agrees with an independent formula") {
  CHECK(cochran_sample_size(3228, 0.95, 0.10) == 94);
  CHECK(cochran_sample_size(154, 0.95, 0.05) == 111);
  CHECK(cochran_sample_size(1, 0.95, 0.10) == 1);
  for (long n : {1L, 2L, 10L, 100L, 385L, 1000L, 20951L, 1000000L}) {
    for (double conf : {0.90, 0.95, 0.99}) {
      for (double e : {0.01, 0.05, 0.10, 0.2}) {
        CHECK(cochran_sample_size(n, conf, e) == std::min<long>(n, cochran_oracle(n, z_score(conf), e)));
      }
    }
  }
  CHECK_THROWS_AS(cochran_sample_size(0, 0.95, 0.1), Error);
  CHECK_THROWS_AS(cochran_sample_size(10, 0.95, 0.0), Error);
  CHECK_THROWS_AS(cochran_sample_size(10, 0.5, 0.1), Error);
}

TEST_CASE("strata buckets and largest-remainder allocation") {
  CHECK(stratum_of(365) == 0);
  CHECK(stratum_of(454) == 0);
  CHECK(stratum_of(455) == 1);
  CHECK(stratum_of(365 + 90 * 8) == 8);
  CHECK(stratum_of(100000) == 8);
  CHECK_THROWS_AS(stratum_of(300), Error);

  std::vector<std::size_t> sizes{10, 10, 10};
  CHECK(allocate_strata(sizes, 10) == std::vector<std::size_t>{4, 3, 3});
  std::vector<std::size_t> skew{90, 9, 1};
  auto alloc = allocate_strata(skew, 10);
  CHECK(alloc == std::vector<std::size_t>{9, 1, 0});
  CHECK_THROWS_AS(allocate_strata(skew, 101), Error);

  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::size_t> s(1 + rng.index(9));
    std::size_t total = 0;
    for (auto& x : s) total += (x = rng.index(40));
    if (total == 0) continue;
    std::size_t n = rng.index(total + 1);
    auto a = allocate_strata(s, n);
    std::size_t sum = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(a[i] <= s[i]);
      double exact = static_cast<double>(n) * static_cast<double>(s[i]) / static_cast<double>(total);
      CHECK(std::abs(static_cast<double>(a[i]) - exact) < 1.0 + 1e-9);
      sum += a[i];
    }
    CHECK(sum == n);
  }
}

TEST_CASE("stratified sample is proportional and reproducible") {
  std::vector<VulnTimeline> pop;
  for (int i = 0; i < 300; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "CVE-2020-%05d", i);
    pop.push_back(tl(id, 365 + (i % 3 == 0 ? 1000 : i % 7)));
  }
  auto a = stratified_sample(pop, 94, 42);
  auto b = stratified_sample(pop, 94, 42);
  auto c = stratified_sample(pop, 94, 43);
  CHECK(a == b);
  CHECK(a != c);
  REQUIRE(a.size() == 94);
  CHECK(std::is_sorted(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.cve_id < y.cve_id; }));
  std::vector<std::size_t> per(9, 0), sizes(9, 0);
  for (const auto& t : a) ++per[static_cast<std::size_t>(stratum_of(t.delta_t_days))];
  for (const auto& t : pop) ++sizes[static_cast<std::size_t>(stratum_of(t.delta_t_days))];
  CHECK(per == allocate_strata(sizes, 94));
  // input order does not matter
  std::reverse(pop.begin(), pop.end());
  CHECK(stratified_sample(pop, 94, 42) == a);
}

TEST_CASE("timeline and annotation json round trips") {
  auto t = tl("CVE-2021-0001", 400);
  t.t_report = t.t_disclose.plus_days(-300);
  t.lifecycle = LifecycleType::SilentFix;
  CHECK(timeline_from_json(to_json(t)) == t);

  DelayAnnotation a{"CVE-2021-0001", {DelayReason::IncompleteFix, DelayReason::DelayedNvdDisclosure}, "two rounds of fixes"};
  auto dir = testing::scratch_dir("ann");
  std::vector<DelayAnnotation> all{a};
  write_annotations((dir / "a.jsonl").string(), all);
  auto back = read_annotations((dir / "a.jsonl").string());
  REQUIRE(back.size() == 1);
  CHECK(back[0].reasons == std::vector<DelayReason>{DelayReason::DelayedNvdDisclosure, DelayReason::IncompleteFix});
  CHECK_THROWS_AS(delay_annotation_from_json(Json{{"cve_id", "CVE-2021-0001"}, {"reasons", Json::array()}}), Error);
  CHECK_THROWS_AS(delay_annotation_from_json(Json{{"cve_id", "CVE-2021-0001"}, {"reasons", Json::array({"Bogus"})}}), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("lifecycle count table") {
  std::vector<VulnTimeline> ts;
  auto a = tl("CVE-2021-0001", 400);
  a.t_report = a.t_earliest;
  a.t_patch = a.t_earliest.plus_days(10);
  a.lifecycle = LifecycleType::CvdOrdered;
  ts.push_back(a);
  auto csv = lifecycle_counts_csv(ts);
  CHECK(csv.find("CvdOrdered,1,10.0,10,390.0,390,400.0,400\n") != std::string::npos);
  CHECK(csv.find("SilentFix,0,,,,,,\n") != std::string::npos);
}
