#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pcve/common/io.hpp"
#include "pcve/dataset/language.hpp"
#include "pcve/dataset/sample.hpp"

namespace pcve::evaluator {

// Ratios are nullopt where their denominator is zero.
struct EvalReport {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::uint64_t detected_pcves = 0, applicable_pcves = 0, total_pcves = 0;
  std::optional<double> precision;
  std::optional<double> f1;  // harmonic mean of precision and applicable recall
  std::optional<double> applicable_recall;
  std::optional<double> all_recall;
  std::optional<double> auc;
};

EvalReport compute_metrics(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn, std::uint64_t detected,
                           std::uint64_t applicable, std::uint64_t total);

struct PrintedCells {
  std::optional<double> precision, f1, applicable_recall, all_recall;
};

struct CellCheck {
  std::string column;
  double printed = 0;
  std::optional<double> computed;
  bool consistent = false;
};

// Compares published cells to what the counts give; a cell is consistent when
// |printed - computed| <= tolerance.
std::vector<CellCheck> reconcile(const EvalReport& report, const PrintedCells& printed, double tolerance = 0.01);

// Mann-Whitney AUC with ties counted one half. Throws SingleClassInput.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct OverlapMatrix {
  std::vector<std::string> detectors;               // sorted
  std::vector<std::vector<std::uint64_t>> pairwise;  // symmetric; diagonal = detected count
  std::vector<std::uint64_t> uniques;
  std::uint64_t union_count = 0;
};

OverlapMatrix overlap_matrix(const std::map<std::string, std::set<std::string>>& detected);

// One row per (detector, sample).
struct PredictionRecord {
  std::string detector;
  std::string sample_id;
  std::optional<std::string> cve_id;
  dataset::Label truth = dataset::Label::NonVuln;
  std::optional<double> score;
  dataset::Label predicted = dataset::Label::NonVuln;
  std::optional<std::string> justification;
};

Json to_json(const PredictionRecord& record);
PredictionRecord prediction_from_json(const Json& row);
std::vector<PredictionRecord> read_predictions(const std::string& path);

// Counts over one detector's predictions. detected = distinct vulnerable
// CVEs with a positive prediction; applicable = distinct vulnerable CVEs the
// detector produced predictions for.
EvalReport evaluate_detector(std::span<const PredictionRecord> predictions, std::uint64_t total_pcves);

// Recall over vulnerable samples per dominant language. Throws JoinFailure
// for predictions naming unknown samples.
std::map<Language, double> per_language_effectiveness(std::span<const PredictionRecord> predictions,
                                                      std::span<const dataset::DetectionSample> samples);

std::string metric_cell(const std::optional<double>& value, int decimals = 2);

}  // namespace pcve::evaluator
