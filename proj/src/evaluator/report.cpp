#include "pcve/evaluator/report.hpp"

#include <set>

namespace pcve::evaluator {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string report_csv(const std::vector<DetectorReport>& reports) {
  std::string out = "detector,tp,fp,fn,tn,detected_pcves,applicable_pcves,total_pcves,precision,f1,applicable_recall,all_recall,auc\n";
  for (const auto& r : reports) {
    const auto& m = r.metrics;
    out += csv_row({r.detector, std::to_string(m.tp), std::to_string(m.fp), std::to_string(m.fn), std::to_string(m.tn),
                    std::to_string(m.detected_pcves), std::to_string(m.applicable_pcves), std::to_string(m.total_pcves),
                    metric_cell(m.precision), metric_cell(m.f1), metric_cell(m.applicable_recall), metric_cell(m.all_recall),
                    m.auc ? format_fixed(*m.auc, 4) : std::string{}});
  }
  return out;
}

Json to_json(const EvalReport& m) {
  return Json{{"tp", m.tp},
              {"fp", m.fp},
              {"fn", m.fn},
              {"tn", m.tn},
              {"detected_pcves", m.detected_pcves},
              {"applicable_pcves", m.applicable_pcves},
              {"total_pcves", m.total_pcves},
              {"precision", optional_number(m.precision)},
              {"f1", optional_number(m.f1)},
              {"applicable_recall", optional_number(m.applicable_recall)},
              {"all_recall", optional_number(m.all_recall)},
              {"auc", optional_number(m.auc)}};
}

Json report_json(const std::vector<DetectorReport>& reports) {
  Json rows = Json::array();
  for (const auto& r : reports) {
    Json row = to_json(r.metrics);
    row["detector"] = r.detector;
    rows.push_back(std::move(row));
  }
  return Json{{"detectors", std::move(rows)}};
}

std::string overlap_csv(const OverlapMatrix& m) {
  std::vector<std::string> header{"detector"};
  header.insert(header.end(), m.detectors.begin(), m.detectors.end());
  header.push_back("unique");
  std::string out = csv_row(header);
  for (std::size_t a = 0; a < m.detectors.size(); ++a) {
    std::vector<std::string> row{m.detectors[a]};
    for (auto c : m.pairwise[a]) row.push_back(std::to_string(c));
    row.push_back(std::to_string(m.uniques[a]));
    out += csv_row(row);
  }
  return out;
}

Json to_json(const OverlapMatrix& m) {
  return Json{{"detectors", m.detectors}, {"pairwise", m.pairwise}, {"uniques", m.uniques}, {"union_count", m.union_count}};
}

std::string per_language_csv(const std::map<std::string, std::map<Language, double>>& by_detector) {
  std::string out = "detector,language,recall\n";
  for (const auto& [detector, langs] : by_detector) {
    for (const auto& [lang, recall] : langs) out += csv_row({detector, std::string(to_string(lang)), format_fixed(recall, 2)});
  }
  return out;
}

}  // namespace pcve::evaluator
