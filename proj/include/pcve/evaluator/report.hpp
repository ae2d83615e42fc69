#pragma once

#include <map>
#include <string>
#include <vector>

#include "pcve/common/io.hpp"
#include "pcve/dataset/language.hpp"
#include "pcve/evaluator/metrics.hpp"

namespace pcve::evaluator {

struct DetectorReport {
  std::string detector;
  EvalReport metrics;
};

// Columns follow the published tables: counts, then Precision, F1,
// Applicable Recall, All Recall, AUC.
std::string report_csv(const std::vector<DetectorReport>& reports);
Json report_json(const std::vector<DetectorReport>& reports);
Json to_json(const EvalReport& report);

std::string overlap_csv(const OverlapMatrix& matrix);
Json to_json(const OverlapMatrix& matrix);

std::string per_language_csv(const std::map<std::string, std::map<Language, double>>& by_detector);

}  // namespace pcve::evaluator
