#include <doctest.h>

#include <set>

#include "corpus.hpp"
#include "fake_source.hpp"
#include "pcve/common/random.hpp"
#include "pcve/dataset/builder.hpp"
#include "pcve/dataset/diff.hpp"
#include "pcve/dataset/sample.hpp"
#include "pcve/dataset/sampler.hpp"
#include "pcve/nvd/cve_record.hpp"

using namespace pcve;
using namespace pcve::dataset;
using testing::make_commit;
using testing::make_issue;
using testing::sha_of;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

const char* kTwoFileDiff =
    "diff --git a/src/a.c b/src/a.c\n"
    "index 111..222 100644\n"
    "--- a/src/a.c\n"
    "+++ b/src/a.c\n"
    "@@ -1,3 +1,4 @@ int main(void)\n"
    " int x;\n"
    "-int y;\n"
    "+int y = 0;\n"
    "+int z;\n"
    "\n"
    "@@ -10,2 +11,2 @@\n"
    " a();\n"
    "-b();\n"
    "+c();\n"
    "\\ No newline at end of file\n"
    "diff --git a/B.java b/B.java\n"
    "--- a/B.java\n"
    "+++ b/B.java\n"
    "@@ -0,0 +1 @@\n"
    "+class B {}\n";

DetectionSample sample_with(const std::string& id, Label label, int era) {
  DetectionSample s;
  s.sample_id = id;
  s.anchor_cve_id = id;
  s.label = label;
  s.era = era;
  return s;
}

}  // namespace

TEST_CASE("unified diff parsing") {
  auto hunks = parse_unified_diff(kTwoFileDiff);
  REQUIRE(hunks.size() == 3);
  CHECK(hunks[0].file_path == "src/a.c");
  CHECK(hunks[0].old_range == LineRange{1, 3});
  CHECK(hunks[0].new_range == LineRange{1, 4});
  CHECK(hunks[0].section == "int main(void)");
  CHECK(hunks[0].added_lines == std::vector<std::string>{"int y = 0;", "int z;"});
  CHECK(hunks[0].removed_lines == std::vector<std::string>{"int y;"});
  CHECK(hunks[1].new_range == LineRange{11, 2});
  CHECK(hunks[2].file_path == "B.java");
  CHECK(hunks[2].old_range == LineRange{0, 0});
  CHECK(hunks[2].new_range == LineRange{1, 1});
  CHECK(serialize_hunks(hunks) == kTwoFileDiff);

  CHECK(parse_unified_diff("").empty());
  CHECK(parse_unified_diff("diff --git a/x b/x\nBinary files differ\n").empty());
  CHECK(kind_of([] { parse_unified_diff("@@ -1,2 +1,2 @@\n a\n"); }) == ErrorKind::MalformedDiff);
  CHECK(kind_of([] { parse_unified_diff("random text\n"); }) == ErrorKind::MalformedDiff);
  CHECK(kind_of([] { parse_unified_diff("@@ -1 +1 @@\n-a\n+b\n+c\n"); }) == ErrorKind::MalformedDiff);
}

TEST_CASE("diff round trip property") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    int files = 1 + static_cast<int>(rng.index(3));
    for (int f = 0; f < files; ++f) {
      text += "--- a/f" + std::to_string(f) + ".c\n+++ b/f" + std::to_string(f) + ".c\n";
      int hunks = 1 + static_cast<int>(rng.index(3));
      for (int h = 0; h < hunks; ++h) {
        std::vector<std::string> lines;
        std::size_t o = 0, n = 0;
        int len = 1 + static_cast<int>(rng.index(6));
        for (int l = 0; l < len; ++l) {
          switch (rng.index(3)) {
            case 0: lines.push_back(" ctx" + std::to_string(l)); ++o; ++n; break;
            case 1: lines.push_back("-old" + std::to_string(l)); ++o; break;
            default: lines.push_back("+new" + std::to_string(l)); ++n; break;
          }
        }
        text += "@@ -" + std::to_string(1 + h * 20) + "," + std::to_string(o) + " +" + std::to_string(1 + h * 20) + "," + std::to_string(n) + " @@\n";
        for (auto& l : lines) text += l + "\n";
      }
    }
    auto parsed = parse_unified_diff(text);
    CHECK(serialize_hunks(parsed) == text);
  }
}

TEST_CASE("hunk splitter keeps supported files only") {
  auto c = make_commit("o/r", sha_of(1), Timestamp::parse("2020-01-01"));
  c.files.push_back({"docs/readme.md", Language::Unsupported, "@@ -1 +1 @@\n-a\n+b\n"});
  c.files.push_back({"src/B.java", Language::Java, "@@ -1 +1 @@\n-a\n+b\n@@ -9 +9 @@\n-c\n+d\n"});
  c.files.push_back({"src/bad.c", Language::C, "not a diff"});
  HunkSplitter splitter;
  auto units = splitter.split(c);
  REQUIRE(units.size() == 4);
  CHECK(units[0].path == "src/a.c");
  CHECK(units[1].language == Language::Java);
  CHECK(units[3].text == "not a diff");
  auto text = commit_diff_text(c);
  CHECK(text.find("readme") == std::string::npos);
  CHECK(commit_diff_text(c, false).find("readme") != std::string::npos);
}

TEST_CASE("exclusion set matches abbreviated shas both ways") {
  ExclusionSet ex;
  ex.add_commit("o/r", "ABCDEF1");
  ex.add_commit("o/r", "1234567890abcdef1234567890abcdef12345678");
  ex.add_issue("o/r", 4);
  CHECK(ex.excludes_commit("o/r", "abcdef1234567890abcdef1234567890abcdef12"));
  CHECK(ex.excludes_commit("o/r", "1234567"));
  CHECK(ex.excludes_commit("o/r", "ABCDEF1"));
  CHECK_FALSE(ex.excludes_commit("o/r", "abcdef2"));
  CHECK_FALSE(ex.excludes_commit("o/x", "abcdef1"));
  CHECK(ex.excludes_issue("o/r", 4));
  CHECK_FALSE(ex.excludes_issue("o/r", 40));
}

TEST_CASE("non-vulnerable sampler basics") {
  auto anchor = Timestamp::parse("2020-06-01");
  std::vector<github::ShallowCommit> pool;
  for (int i = 0; i < 30; ++i) pool.push_back({sha_of(static_cast<std::uint64_t>(i + 1)), anchor.plus_days(-200 + i * 14), "m"});
  ExclusionSet ex;
  ex.add_commit("o/r", sha_of(10));
  WindowOptions w;
  auto a = sample_non_vulnerable(pool, "o/r", anchor, ex, w, 1);
  auto b = sample_non_vulnerable(pool, "o/r", anchor, ex, w, 1);
  CHECK(a == b);
  CHECK(a.size() == 5);
  for (const auto& sha : a) CHECK(sha != sha_of(10));
  WindowOptions big{100, 183};
  std::size_t eligible = 0;
  for (const auto& c : pool) {
    auto d = floor_days_between(anchor, c.authored_at);
    if (std::abs(d) <= 183 && c.sha != sha_of(10)) ++eligible;
  }
  CHECK(sample_non_vulnerable(pool, "o/r", anchor, ex, big, 1).size() == eligible);
  CHECK(kind_of([&] { sample_non_vulnerable(pool, "o/r", anchor, ex, WindowOptions{0, 183}, 1); }) == ErrorKind::InvalidArgument);

  std::vector<github::ShallowIssue> issues{{1, anchor, false}, {2, anchor.plus_days(100), true}, {3, anchor.plus_days(400), false}};
  ExclusionSet ex2;
  ex2.add_issue("o/r", 1);
  auto picked = sample_non_vulnerable_issues(issues, "o/r", anchor, ex2, w, 3);
  REQUIRE(picked.size() == 1);
  CHECK(picked[0].number == 2);
}

TEST_CASE("dominant language and sample building") {
  auto t = Timestamp::parse("2020-01-01");
  auto c1 = make_commit("o/r", sha_of(1), t, "m", "a.java");
  auto c2 = make_commit("o/r", sha_of(2), t, "m", "a.c");
  std::vector<github::Commit> tie{c1, c2};
  CHECK(dominant_language(tie) == Language::C);
  std::vector<github::Commit> none{make_commit("o/r", sha_of(3), t, "m", "a.py")};
  CHECK_FALSE(dominant_language(none).has_value());

  nvd::CveRecord cve;
  cve.cve_id = "CVE-2021-0007";
  cve.disclosed_at = Timestamp::parse("2021-05-01");
  auto issue = make_issue("o/r", 1, t);
  auto ok = build_sample(cve, SampleInput{{issue}, {}, {c2, none[0]}}, Label::Vuln, true);
  CHECK(ok.sample_id == "CVE-2021-0007");
  CHECK(ok.cve_id == "CVE-2021-0007");
  CHECK(ok.commits.size() == 1);
  CHECK(ok.era == 2021);
  CHECK(ok.dominant_language == Language::C);
  CHECK(detection_sample_from_json(to_json(ok)) == ok);

  CHECK(kind_of([&] { build_sample(cve, SampleInput{{issue}, {}, {}}, Label::Vuln, true); }) == ErrorKind::MissingCommit);
  CHECK(kind_of([&] { build_sample(cve, SampleInput{{}, {}, {c2}}, Label::Vuln, true); }) == ErrorKind::MissingDiscussion);
  auto late = make_commit("o/r", sha_of(4), cve.disclosed_at);
  CHECK(kind_of([&] { build_sample(cve, SampleInput{{issue}, {}, {late}}, Label::Vuln, true); }) == ErrorKind::PostDisclosureArtifact);
  CHECK_NOTHROW(build_sample(cve, SampleInput{{issue}, {}, {late}}, Label::NonVuln, false));
  CHECK(kind_of([&] { build_sample(cve, SampleInput{{issue}, {}, {none[0]}}, Label::Vuln, true); }) == ErrorKind::UnsupportedLanguageOnly);
  auto nv = build_sample(cve, SampleInput{{issue}, {}, {c1}}, Label::NonVuln, true);
  CHECK(nv.sample_id == "nv-CVE-2021-0007");
  CHECK_FALSE(nv.cve_id.has_value());
}

TEST_CASE("temporal split properties") {
  std::vector<DetectionSample> samples;
  for (int i = 0; i < 100; ++i) {
    int era = i < 12 ? 2021 + i % 3 : (i < 20 ? 2020 : 2015 + i % 5);
    samples.push_back(sample_with("s" + std::to_string(100 + i), i % 2 ? Label::Vuln : Label::NonVuln, era));
  }
  auto m = split_dataset(samples, {}, 2020, 5);
  CHECK(m.test_ids.size() == 10);
  CHECK(m.val_ids.size() == 10);
  std::map<std::string, int> era;
  for (const auto& s : samples) era[s.sample_id] = s.era;
  for (const auto& id : m.test_ids) CHECK(era[id] > 2020);
  for (const auto& id : m.train_ids) CHECK(era[id] <= 2020);
  for (const auto& id : m.val_ids) CHECK(era[id] <= 2020);
  CHECK(m.unassigned_ids.size() == 2);
  std::set<std::string> all;
  for (auto* part : {&m.train_ids, &m.val_ids, &m.test_ids, &m.unassigned_ids}) {
    for (const auto& id : *part) CHECK(all.insert(id).second);
  }
  CHECK(all.size() == samples.size());
  CHECK(split_dataset(samples, {}, 2020, 5) == m);
  CHECK(split_manifest_from_json(to_json(m)) == m);

  // too few post-boundary samples: the boundary year tops up the quota
  std::vector<DetectionSample> thin;
  for (int i = 0; i < 50; ++i) thin.push_back(sample_with("t" + std::to_string(i), i % 2 ? Label::Vuln : Label::NonVuln, i < 2 ? 2022 : (i < 10 ? 2020 : 2018)));
  auto mt = split_dataset(thin, {}, 2020, 1);
  CHECK(mt.test_ids.size() == 5);
  std::vector<DetectionSample> old;
  for (int i = 0; i < 10; ++i) old.push_back(sample_with("o" + std::to_string(i), Label::Vuln, 2015));
  CHECK(kind_of([&] { split_dataset(old, {}, 2020, 1); }) == ErrorKind::EmptyEra);
  CHECK(kind_of([&] { split_dataset(samples, {0.5, 0.1, 0.1}, 2020, 1); }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("dataset builder with pair snapshots and non-vulnerable draws") {
  testing::FakeSource src;
  const std::string repo = "o/r";
  auto fix_at = Timestamp::parse("2019-03-01");
  auto fix = make_commit(repo, sha_of(1), fix_at, "Fix overflow (#7)");
  auto issue = make_issue(repo, 7, fix_at.plus_days(-10));
  issue.comments = {{"a", fix_at.plus_days(-5), "before"}, {"b", fix_at.plus_days(3), "after the fix"}};
  src.add(fix);
  src.add(issue);
  for (int i = 0; i < 12; ++i) {
    src.add(make_commit(repo, sha_of(100 + static_cast<std::uint64_t>(i)), fix_at.plus_days(-60 + i * 10), "chore", i % 4 == 0 ? "x.py" : "y.c"));
    src.add(make_issue(repo, 200 + static_cast<std::uint64_t>(i), fix_at.plus_days(-70 + i * 10)));
  }
  src.add(make_issue(repo, 999, fix_at.plus_days(-20)));  // mentioned by another CVE

  nvd::CveRecord cve;
  cve.cve_id = "CVE-2021-1000";
  cve.disclosed_at = Timestamp::parse("2021-01-01");
  cve.references = {nvd::classify_reference("https://github.com/o/r/commit/" + sha_of(1)), nvd::classify_reference("https://github.com/o/r/issues/7")};
  nvd::CveRecord other;
  other.cve_id = "CVE-2020-2000";
  other.disclosed_at = Timestamp::parse("2020-01-01");
  other.references = {nvd::classify_reference("https://github.com/o/r/issues/999")};

  std::vector<nvd::CveRecord> cves{cve};
  std::vector<nvd::CveRecord> corpus{cve, other};
  auto collected = github::collect_all(cves, src);
  auto ex = build_exclusions(corpus, collected);
  CHECK(ex.excludes_issue(repo, 999));
  CHECK(ex.excludes_commit(repo, sha_of(1)));

  BuildOptions opts;
  opts.seed = 3;
  auto result = build_dataset(cves, collected, src, ex, opts);
  REQUIRE(result.samples.size() == 2);
  const auto& v = result.samples[0];
  const auto& nv = result.samples[1];
  CHECK(v.label == Label::Vuln);
  REQUIRE(v.issues.size() == 1);
  CHECK(v.issues[0].comments.size() == 1);  // as of the fix
  CHECK(nv.label == Label::NonVuln);
  CHECK(nv.anchor_cve_id == cve.cve_id);
  CHECK(nv.commits.size() == 5);
  CHECK(nv.issues.size() + nv.pulls.size() == 5);
  for (const auto& c : nv.commits) {
    CHECK_FALSE(ex.excludes_commit(repo, c.sha));
    CHECK(touches_supported_language(c));
    CHECK(std::abs(floor_days_between(fix_at, c.authored_at)) <= 183);
  }
  for (const auto& i : nv.issues) CHECK_FALSE(ex.excludes_issue(repo, i.number));
  CHECK(result.report.vuln_samples == 1);
  CHECK(result.report.non_vuln_samples == 1);

  auto again = build_dataset(cves, collected, src, ex, opts);
  CHECK(again.samples == result.samples);
  opts.parallelism = 1;
  CHECK(build_dataset(cves, collected, src, ex, opts).samples == result.samples);
}
