#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcve/common/io.hpp"
#include "pcve/dataset/sample.hpp"
#include "pcve/detector/features.hpp"

namespace pcve::detector {

struct TrainOptions {
  double learning_rate = 0.5;
  int epochs = 400;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  // Replaces the seeded U(-0.01, 0.01) start; last entry is the bias.
  std::optional<std::vector<double>> initial_parameters;
};

struct TrainingMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  double learning_rate = 0;
  double l2 = 0;
  std::vector<double> loss_curve;  // loss before each update, then the final loss
};

struct ClassifierModel {
  std::vector<double> weights;
  double bias = 0;
  double threshold = 0.5;
  FeatureDims dims;
  std::string config_hash;
  std::string feature_config;
  TrainingMeta training;
};

struct LabeledFeatures {
  std::span<const FeatureVector> features;
  std::span<const int> labels;  // 1 = vulnerable
};

double sigmoid(double z);

// Mean logistic loss plus (l2 / 2) * |w|^2, and its gradient (bias last).
struct LossGradient {
  double loss = 0;
  std::vector<double> gradient;
};
LossGradient loss_and_gradient(std::span<const double> weights, double bias, const LabeledFeatures& data, double l2);

// Full-batch gradient descent. Throws SingleClassInput, DivergedLoss.
ClassifierModel train(const LabeledFeatures& data, const TrainOptions& options);

struct Prediction {
  std::string sample_id;
  double score = 0;
  dataset::Label label = dataset::Label::NonVuln;
  std::optional<std::string> justification;
};

double score(const ClassifierModel& model, const FeatureVector& features);
Prediction predict(const ClassifierModel& model, const FeatureVector& features, const std::string& sample_id = {});

inline constexpr std::string_view kModelFormat = "pcve-linear";
inline constexpr int kModelVersion = 1;

Json to_json(const ClassifierModel& model);
ClassifierModel model_from_json(const Json& doc);

}  // namespace pcve::detector
