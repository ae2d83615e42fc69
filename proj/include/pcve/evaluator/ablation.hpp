#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcve/dataset/sample.hpp"
#include "pcve/detector/classifier.hpp"
#include "pcve/detector/features.hpp"

namespace pcve::evaluator {

struct LabeledEmbeddings {
  std::span<const detector::SampleEmbeddings> embeddings;
  std::span<const int> labels;  // parallel to embeddings, 1 = vulnerable
};

// Trains on `train_ids` under one configuration and scores `test_ids`.
struct ConfigRun {
  detector::ClassifierModel model;
  std::vector<std::string> test_ids;
  std::vector<double> test_scores;
  std::vector<int> test_labels;
  double auc = 0;
};

ConfigRun run_config(const LabeledEmbeddings& data, const std::vector<std::string>& train_ids,
                     const std::vector<std::string>& test_ids, const detector::AblationConfig& config,
                     const detector::FeatureContext& context, const detector::TrainOptions& options);

struct AblationResult {
  std::string config;
  double auc = 0;
  std::optional<double> delta_auc;  // AUC(All Features) - AUC(config)
};

// Same split, seed and hyperparameters for every configuration.
std::vector<AblationResult> ablation_sweep(const LabeledEmbeddings& data, const dataset::SplitManifest& split,
                                           std::span<const detector::AblationConfig> configs,
                                           const detector::FeatureContext& context, const detector::TrainOptions& options);

std::string ablation_csv(std::span<const AblationResult> results);

}  // namespace pcve::evaluator
