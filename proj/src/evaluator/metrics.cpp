#include "pcve/evaluator/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcve/common/error.hpp"

namespace pcve::evaluator {

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport compute_metrics(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn, std::uint64_t detected,
                           std::uint64_t applicable, std::uint64_t total) {
  if (detected > applicable) fail(ErrorKind::InvalidArgument, "detected exceeds applicable");
  if (applicable > total) fail(ErrorKind::InvalidArgument, "applicable exceeds total");
  EvalReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.tn = tn;
  r.detected_pcves = detected;
  r.applicable_pcves = applicable;
  r.total_pcves = total;
  r.precision = ratio(tp, tp + fp);
  r.applicable_recall = ratio(detected, applicable);
  r.all_recall = ratio(detected, total);
  if (r.precision && r.applicable_recall && (*r.precision + *r.applicable_recall) > 0) {
    r.f1 = 2 * *r.precision * *r.applicable_recall / (*r.precision + *r.applicable_recall);
  } else if (r.precision && r.applicable_recall) {
    r.f1 = 0.0;
  }
  return r;
}

std::vector<CellCheck> reconcile(const EvalReport& report, const PrintedCells& printed, double tolerance) {
  std::vector<CellCheck> out;
  auto check = [&](const char* column, const std::optional<double>& p, const std::optional<double>& c) {
    if (!p) return;
    CellCheck cell{column, *p, c, c && std::abs(*p - *c) <= tolerance + 1e-12};
    out.push_back(cell);
  };
  check("precision", printed.precision, report.precision);
  check("f1", printed.f1, report.f1);
  check("applicable_recall", printed.applicable_recall, report.applicable_recall);
  check("all_recall", printed.all_recall, report.all_recall);
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) fail(ErrorKind::InvalidArgument, "scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Twice the rank sum of positives, with tied groups sharing their mean rank;
  // integers throughout so the result is exact.
  std::uint64_t twice_rank_sum = 0, pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const std::uint64_t twice_mean_rank = (i + 1) + j;  // ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        twice_rank_sum += twice_mean_rank;
        ++pos;
      }
    }
    i = j;
  }
  const std::uint64_t neg = n - pos;
  if (pos == 0 || neg == 0) fail(ErrorKind::SingleClassInput, "AUC needs both classes");
  // U = R - pos(pos+1)/2, AUC = U / (pos * neg)
  const double twice_u = static_cast<double>(twice_rank_sum) - static_cast<double>(pos * (pos + 1));
  return twice_u / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

OverlapMatrix overlap_matrix(const std::map<std::string, std::set<std::string>>& detected) {
  if (detected.empty()) fail(ErrorKind::InvalidArgument, "overlap needs at least one detector");
  OverlapMatrix m;
  std::vector<const std::set<std::string>*> sets;
  std::set<std::string> all;
  for (const auto& [name, ids] : detected) {
    m.detectors.push_back(name);
    sets.push_back(&ids);
    all.insert(ids.begin(), ids.end());
  }
  const std::size_t d = sets.size();
  m.pairwise.assign(d, std::vector<std::uint64_t>(d, 0));
  m.uniques.assign(d, 0);
  m.union_count = all.size();
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      std::uint64_t c = 0;
      for (const auto& id : *sets[a]) c += sets[b]->contains(id);
      m.pairwise[a][b] = m.pairwise[b][a] = c;
    }
    for (const auto& id : *sets[a]) {
      bool elsewhere = false;
      for (std::size_t b = 0; b < d && !elsewhere; ++b) elsewhere = b != a && sets[b]->contains(id);
      if (!elsewhere) ++m.uniques[a];
    }
  }
  return m;
}

Json to_json(const PredictionRecord& r) {
  Json row{{"detector", r.detector},
           {"sample_id", r.sample_id},
           {"cve_id", r.cve_id ? Json(*r.cve_id) : Json(nullptr)},
           {"truth", std::string(dataset::to_string(r.truth))},
           {"score", r.score ? Json(*r.score) : Json(nullptr)},
           {"predicted", std::string(dataset::to_string(r.predicted))}};
  if (r.justification) row["justification"] = *r.justification;
  return row;
}

PredictionRecord prediction_from_json(const Json& row) {
  try {
    PredictionRecord r;
    r.detector = row.at("detector").get<std::string>();
    r.sample_id = row.at("sample_id").get<std::string>();
    if (row.contains("cve_id") && !row.at("cve_id").is_null()) r.cve_id = row.at("cve_id").get<std::string>();
    r.truth = dataset::label_from_string(row.at("truth").get<std::string>());
    if (row.contains("score") && !row.at("score").is_null()) r.score = row.at("score").get<double>();
    if (row.contains("predicted") && !row.at("predicted").is_null()) {
      r.predicted = dataset::label_from_string(row.at("predicted").get<std::string>());
    } else if (r.score) {
      r.predicted = *r.score >= 0.5 ? dataset::Label::Vuln : dataset::Label::NonVuln;
    } else {
      fail(ErrorKind::MalformedRecord, r.sample_id + ": prediction has neither score nor label");
    }
    if (row.contains("justification") && row.at("justification").is_string()) r.justification = row.at("justification").get<std::string>();
    if (r.truth == dataset::Label::Vuln && !r.cve_id) fail(ErrorKind::MalformedRecord, r.sample_id + ": vulnerable row without cve_id");
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedRecord, std::string("prediction row: ") + e.what());
  }
}

std::vector<PredictionRecord> read_predictions(const std::string& path) {
  std::vector<PredictionRecord> out;
  for (const auto& row : read_jsonl(path)) out.push_back(prediction_from_json(row));
  return out;
}

EvalReport evaluate_detector(std::span<const PredictionRecord> predictions, std::uint64_t total_pcves) {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::set<std::string> applicable, detected;
  std::vector<double> scores;
  std::vector<int> labels;
  bool all_scored = !predictions.empty();
  for (const auto& p : predictions) {
    const bool truth = p.truth == dataset::Label::Vuln;
    const bool pred = p.predicted == dataset::Label::Vuln;
    if (truth && pred) ++tp;
    if (!truth && pred) ++fp;
    if (truth && !pred) ++fn;
    if (!truth && !pred) ++tn;
    if (truth) {
      applicable.insert(*p.cve_id);
      if (pred) detected.insert(*p.cve_id);
    }
    if (p.score) {
      scores.push_back(*p.score);
      labels.push_back(truth ? 1 : 0);
    } else {
      all_scored = false;
    }
  }
  auto report = compute_metrics(tp, fp, fn, tn, detected.size(), applicable.size(), total_pcves);
  if (all_scored && tp + fn > 0 && fp + tn > 0) report.auc = roc_auc(scores, labels);
  return report;
}

std::map<Language, double> per_language_effectiveness(std::span<const PredictionRecord> predictions,
                                                      std::span<const dataset::DetectionSample> samples) {
  std::map<std::string, const dataset::DetectionSample*> by_id;
  for (const auto& s : samples) by_id[s.sample_id] = &s;
  std::map<Language, std::pair<std::uint64_t, std::uint64_t>> counts;  // detected, total
  for (const auto& p : predictions) {
    auto it = by_id.find(p.sample_id);
    if (it == by_id.end()) fail(ErrorKind::JoinFailure, "prediction for unknown sample " + p.sample_id);
    if (it->second->label != dataset::Label::Vuln) continue;
    auto& c = counts[it->second->dominant_language];
    ++c.second;
    if (p.predicted == dataset::Label::Vuln) ++c.first;
  }
  std::map<Language, double> out;
  for (const auto& [lang, c] : counts) out[lang] = static_cast<double>(c.first) / static_cast<double>(c.second);
  return out;
}

std::string metric_cell(const std::optional<double>& value, int decimals) {
  return value ? format_fixed(*value, decimals) : std::string("undefined");
}

}  // namespace pcve::evaluator
