#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcve/evaluator/metrics.hpp"

namespace pcve::testing {

// Counts and printed cells from the published detector tables. Detected
// PCVEs equal TP; applicable is the #Vuln column.
struct PublishedRow {
  std::string table;
  std::string detector;
  std::uint64_t tp, fp, fn, tn, applicable, total;
  evaluator::PrintedCells printed;
  bool consistent;  // false where the printed cells do not follow from the counts
};

inline const std::vector<PublishedRow>& published_rows() {
  static const std::vector<PublishedRow> rows{
      {"mined", "MemVul", 525, 273, 276, 158, 683, 2402, {0.66, 0.71, 0.77, 0.22}, true},
      {"mined", "VulCurator", 109, 84, 72, 101, 210, 2402, {0.60, 0.56, 0.52, 0.05}, false},
      {"mined", "LineVul", 219, 473, 267, 3, 486, 2402, {0.32, 0.37, 0.45, 0.09}, true},
      {"mined", "DeepDFA", 323, 151, 70, 6, 393, 2402, {0.68, 0.75, 0.82, 0.13}, true},
      {"mined", "PatchRNN", 444, 496, 216, 120, 660, 2402, {0.47, 0.56, 0.67, 0.18}, true},
      {"recent", "MemVul", 285, 138, 239, 311, 524, 826, {0.67, 0.60, 0.54, 0.35}, true},
      {"recent", "VulCurator", 75, 70, 75, 51, 150, 826, {0.52, 0.51, 0.50, 0.09}, true},
      {"recent", "LineVul", 75, 148, 82, 6, 157, 826, {0.34, 0.40, 0.48, 0.09}, true},
      {"recent", "DeepDFA", 109, 68, 16, 3, 125, 826, {0.62, 0.72, 0.87, 0.13}, true},
      {"recent", "PatchRNN", 181, 191, 72, 36, 253, 826, {0.49, 0.58, 0.72, 0.22}, true},
      {"recent", "DeeptraVul", 121, 28, 13, 73, 134, 826, {0.81, 0.86, 0.90, 0.15}, true},
      {"recent", "GPT-4o", 112, 63, 22, 38, 134, 826, {0.64, 0.72, 0.84, 0.14}, true},
  };
  return rows;
}

inline evaluator::EvalReport metrics_for(const PublishedRow& r) {
  return evaluator::compute_metrics(r.tp, r.fp, r.fn, r.tn, r.tp, r.applicable, r.total);
}

}  // namespace pcve::testing
