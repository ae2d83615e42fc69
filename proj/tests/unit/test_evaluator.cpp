#include <doctest.h>

#include "oracles.hpp"
#include "published_tables.hpp"
#include "pcve/common/error.hpp"
#include "pcve/common/random.hpp"
#include "pcve/evaluator/ablation.hpp"
#include "pcve/evaluator/metrics.hpp"
#include "pcve/evaluator/report.hpp"

using namespace pcve;
using namespace pcve::evaluator;
using dataset::Label;

TEST_CASE("published cells follow from the counts") {
  for (const auto& row : testing::published_rows()) {
    INFO(row.table << " " << row.detector);
    auto checks = reconcile(testing::metrics_for(row), row.printed);
    REQUIRE(checks.size() == 4);
    bool all_ok = true;
    for (const auto& c : checks) all_ok = all_ok && c.consistent;
    CHECK(all_ok == row.consistent);
  }
}

TEST_CASE("the inconsistent printed precision is flagged") {
  const auto& vc = testing::published_rows()[1];
  REQUIRE(vc.detector == "VulCurator");
  auto m = testing::metrics_for(vc);
  CHECK(*m.precision == doctest::Approx(109.0 / 193.0));
  auto checks = reconcile(m, vc.printed);
  CHECK_FALSE(checks[0].consistent);
  CHECK(checks[2].consistent);
  CHECK(checks[3].consistent);
}

TEST_CASE("metric definitions") {
  auto m = compute_metrics(525, 273, 276, 158, 525, 683, 2402);
  CHECK(*m.precision == doctest::Approx(525.0 / 798));
  CHECK(*m.applicable_recall == doctest::Approx(525.0 / 683));
  CHECK(*m.all_recall == doctest::Approx(525.0 / 2402));
  double p = *m.precision, r = *m.applicable_recall;
  CHECK(*m.f1 == doctest::Approx(2 * p * r / (p + r)));

  auto none = compute_metrics(0, 0, 3, 3, 0, 3, 10);
  CHECK_FALSE(none.precision);
  CHECK_FALSE(none.f1);
  CHECK(*none.applicable_recall == 0.0);
  auto empty = compute_metrics(0, 0, 0, 0, 0, 0, 0);
  CHECK_FALSE(empty.applicable_recall);
  CHECK_FALSE(empty.all_recall);
  CHECK(metric_cell(empty.f1) == "undefined");
  CHECK(metric_cell(0.655) == "0.66");
  CHECK_THROWS_AS(compute_metrics(1, 0, 0, 0, 5, 4, 10), Error);
  CHECK_THROWS_AS(compute_metrics(1, 0, 0, 0, 1, 11, 10), Error);
}

TEST_CASE("AUC matches pair counting") {
  std::vector<double> s{0.9, 0.8, 0.7, 0.6};
  std::vector<int> y{1, 0, 1, 0};
  CHECK(roc_auc(s, y) == 0.75);
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + rng.index(49);
    std::vector<double> scores;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
      // coarse grid so ties are common
      scores.push_back(static_cast<double>(rng.index(trial % 2 ? 5 : 1000)) / 10.0);
      labels.push_back(static_cast<int>(rng.index(2)));
    }
    labels[0] = 1;
    labels[1] = 0;
    CHECK(roc_auc(scores, labels) == testing::brute_force_auc(scores, labels));
  }
  CHECK(roc_auc(std::vector<double>{1, 1}, std::vector<int>{1, 0}) == 0.5);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), Error);
}

TEST_CASE("AUC is invariant to monotone transforms") {
  Rng rng(3);
  std::vector<double> s, t;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    s.push_back(rng.uniform(-3, 3));
    t.push_back(std::exp(2 * s.back()) + 1);
    y.push_back(i % 3 == 0);
  }
  CHECK(roc_auc(s, y) == roc_auc(t, y));
}

TEST_CASE("overlap matrix") {
  std::map<std::string, std::set<std::string>> d{{"b", {"1", "2", "3"}}, {"a", {"3", "4"}}, {"c", {}}};
  auto m = overlap_matrix(d);
  CHECK(m.detectors == std::vector<std::string>{"a", "b", "c"});
  CHECK(m.pairwise[0][0] == 2);
  CHECK(m.pairwise[0][1] == 1);
  CHECK(m.pairwise[1][0] == 1);
  CHECK(m.uniques == std::vector<std::uint64_t>{1, 2, 0});
  CHECK(m.union_count == 4);
  CHECK(overlap_csv(m) == "detector,a,b,c,unique\na,2,1,0,1\nb,1,3,0,2\nc,0,0,0,0\n");

  // Union = sum of uniques + ids seen by two or more detectors.
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::string, std::set<std::string>> r;
    for (int k = 0; k < 4; ++k) {
      auto& set = r["d" + std::to_string(k)];
      for (int i = 0; i < 30; ++i) {
        if (rng.index(3) == 0) set.insert(std::to_string(i));
      }
    }
    auto o = overlap_matrix(r);
    std::map<std::string, int> seen;
    for (const auto& [_, ids] : r) {
      for (const auto& id : ids) ++seen[id];
    }
    std::uint64_t shared = 0, uniq = 0;
    for (const auto& [_, c] : seen) shared += c > 1;
    for (auto u : o.uniques) uniq += u;
    CHECK(o.union_count == uniq + shared);
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = 0; b < 4; ++b) CHECK(o.pairwise[a][b] == o.pairwise[b][a]);
    }
  }
}

namespace {

PredictionRecord rec(const std::string& id, Label truth, Label pred, std::optional<double> score,
                     std::optional<std::string> cve = std::nullopt) {
  PredictionRecord r;
  r.detector = "X";
  r.sample_id = id;
  r.truth = truth;
  r.predicted = pred;
  r.score = score;
  r.cve_id = cve;
  return r;
}

}  // namespace

TEST_CASE("detector evaluation from prediction rows") {
  std::vector<PredictionRecord> rows{
      rec("v1", Label::Vuln, Label::Vuln, 0.9, "CVE-1"),     rec("v1b", Label::Vuln, Label::NonVuln, 0.2, "CVE-1"),
      rec("v2", Label::Vuln, Label::NonVuln, 0.4, "CVE-2"), rec("n1", Label::NonVuln, Label::Vuln, 0.6),
      rec("n2", Label::NonVuln, Label::NonVuln, 0.1),
  };
  auto m = evaluate_detector(rows, 10);
  CHECK(m.tp == 1);
  CHECK(m.fn == 2);
  CHECK(m.fp == 1);
  CHECK(m.tn == 1);
  CHECK(m.detected_pcves == 1);
  CHECK(m.applicable_pcves == 2);
  CHECK(*m.all_recall == doctest::Approx(0.1));
  REQUIRE(m.auc);
  std::vector<double> s{0.9, 0.2, 0.4, 0.6, 0.1};
  std::vector<int> y{1, 1, 1, 0, 0};
  CHECK(*m.auc == testing::brute_force_auc(s, y));
  rows[0].score.reset();
  CHECK_FALSE(evaluate_detector(rows, 10).auc);

  auto back = prediction_from_json(to_json(rows[1]));
  CHECK(back.cve_id == rows[1].cve_id);
  CHECK(back.score == rows[1].score);
  CHECK_THROWS_AS(prediction_from_json(Json{{"detector", "X"}, {"sample_id", "s"}, {"truth", "Vuln"}, {"score", 1.0}}), Error);
}

TEST_CASE("per-language recall") {
  std::vector<dataset::DetectionSample> samples(4);
  samples[0].sample_id = "a";
  samples[0].dominant_language = Language::C;
  samples[1].sample_id = "b";
  samples[1].dominant_language = Language::C;
  samples[2].sample_id = "c";
  samples[2].dominant_language = Language::Java;
  samples[3].sample_id = "d";
  samples[3].label = Label::NonVuln;
  std::vector<PredictionRecord> rows{rec("a", Label::Vuln, Label::Vuln, 1, "C1"), rec("b", Label::Vuln, Label::NonVuln, 0, "C2"),
                                     rec("c", Label::Vuln, Label::Vuln, 1, "C3"), rec("d", Label::NonVuln, Label::Vuln, 1)};
  auto by = per_language_effectiveness(rows, samples);
  CHECK(by.size() == 2);
  CHECK(by[Language::C] == 0.5);
  CHECK(by[Language::Java] == 1.0);
  CHECK(per_language_csv({{"X", by}}) == "detector,language,recall\nX,C,0.50\nX,Java,1.00\n");
  rows.push_back(rec("zzz", Label::Vuln, Label::Vuln, 1, "C9"));
  CHECK_THROWS_AS(per_language_effectiveness(rows, samples), Error);
}

TEST_CASE("report files") {
  auto m = compute_metrics(121, 28, 13, 73, 121, 134, 826);
  m.auc = 0.5;
  auto csv = report_csv({{"DeeptraVul", m}});
  CHECK(csv.find("detector,tp,fp,fn,tn,") == 0);
  CHECK(csv.find("DeeptraVul,121,28,13,73,121,134,826,0.81,0.86,0.90,0.15,0.5000") != std::string::npos);
  auto j = report_json({{"DeeptraVul", m}});
  CHECK(j["detectors"][0]["tp"] == 121);
  CHECK(j["detectors"][0]["detector"] == "DeeptraVul");
  auto undefined = compute_metrics(0, 0, 0, 0, 0, 0, 5);
  CHECK(report_json({{"Y", undefined}})["detectors"][0]["precision"].is_null());
}

TEST_CASE("ablation sweep shares one split") {
  detector::HashingEncoder text(16, detector::EmbeddingSource::Text, 1), code(16, detector::EmbeddingSource::Code, 2);
  auto defs = detector::load_cwe_definitions();
  auto anchors = detector::build_anchor_store(defs, text);
  dataset::HunkSplitter splitter;
  detector::FeatureContext ctx{text, code, anchors, splitter, {16, 16, 4}};
  std::vector<detector::SampleEmbeddings> emb;
  std::vector<int> labels;
  dataset::SplitManifest split;
  for (int i = 0; i < 40; ++i) {
    int y = i % 2;
    detector::SampleEmbeddings e;
    e.sample_id = "s" + std::to_string(i);
    e.discussion = text.encode(y ? "buffer overflow crash " + std::to_string(i) : "docs typo " + std::to_string(i));
    e.commit_message = text.encode("commit " + std::to_string(i));
    e.code = code.encode("int f" + std::to_string(i % 5) + "();");
    emb.push_back(e);
    labels.push_back(y);
    (i < 30 ? split.train_ids : split.test_ids).push_back(e.sample_id);
  }
  detector::TrainOptions o;
  o.epochs = 100;
  auto results = ablation_sweep({emb, labels}, split, detector::table6_configs(), ctx, o);
  REQUIRE(results.size() == 5);
  CHECK(results.back().config == detector::kAllFeatures);
  for (const auto& r : results) {
    REQUIRE(r.delta_auc);
    CHECK(*r.delta_auc == doctest::Approx(results.back().auc - r.auc));
  }
  auto csv = ablation_csv(results);
  CHECK(csv.find("config,auc,delta_auc\n") == 0);
  CHECK(csv.find("All Features,") != std::string::npos);
  split.test_ids.push_back("missing");
  CHECK_THROWS_AS(ablation_sweep({emb, labels}, split, detector::table6_configs(), ctx, o), Error);
}
