#include "pcve/detector/classifier.hpp"

#include <cmath>

#include "pcve/common/error.hpp"
#include "pcve/common/random.hpp"

namespace pcve::detector {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double dot(std::span<const double> w, std::span<const double> x) {
  double s = 0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
  return s;
}

void check_shapes(std::span<const double> weights, const LabeledFeatures& data) {
  if (data.features.size() != data.labels.size()) fail(ErrorKind::InvalidArgument, "features and labels differ in length");
  if (data.features.empty()) fail(ErrorKind::EmptyInput, "no training data");
  for (const auto& f : data.features) {
    if (f.values.size() != weights.size()) fail(ErrorKind::DimensionMismatch, "feature length does not match the model");
  }
}

}  // namespace

LossGradient loss_and_gradient(std::span<const double> weights, double bias, const LabeledFeatures& data, double l2) {
  check_shapes(weights, data);
  const std::size_t d = weights.size();
  const double n = static_cast<double>(data.features.size());
  LossGradient out;
  out.gradient.assign(d + 1, 0.0);
  double loss = 0;
  for (std::size_t s = 0; s < data.features.size(); ++s) {
    const auto& x = data.features[s].values;
    const double z = dot(weights, x) + bias;
    const double y = data.labels[s] ? 1.0 : 0.0;
    // -[y log p + (1-y) log(1-p)] = softplus(z) - y z
    loss += softplus(z) - y * z;
    const double r = sigmoid(z) - y;
    if (r != 0) {
      for (std::size_t i = 0; i < d; ++i) out.gradient[i] += r * x[i];
    }
    out.gradient[d] += r;
  }
  double penalty = 0;
  for (std::size_t i = 0; i < d; ++i) {
    out.gradient[i] = out.gradient[i] / n + l2 * weights[i];
    penalty += weights[i] * weights[i];
  }
  out.gradient[d] /= n;
  out.loss = loss / n + 0.5 * l2 * penalty;
  return out;
}

ClassifierModel train(const LabeledFeatures& data, const TrainOptions& options) {
  if (data.features.empty()) fail(ErrorKind::EmptyInput, "no training data");
  bool has_pos = false, has_neg = false;
  for (int y : data.labels) (y ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) fail(ErrorKind::SingleClassInput, "training data has a single class");
  if (!(options.threshold > 0 && options.threshold < 1)) fail(ErrorKind::ConfigInvalid, "threshold must lie in (0, 1)");
  if (options.epochs < 0 || !(options.learning_rate > 0)) fail(ErrorKind::ConfigInvalid, "invalid learning rate or epochs");

  ClassifierModel model;
  model.dims = data.features.front().dims;
  const std::size_t d = data.features.front().values.size();
  if (options.initial_parameters) {
    if (options.initial_parameters->size() != d + 1) fail(ErrorKind::DimensionMismatch, "initial parameters have the wrong length");
    model.weights.assign(options.initial_parameters->begin(), options.initial_parameters->end() - 1);
    model.bias = options.initial_parameters->back();
  } else {
    Rng rng(options.seed);
    model.weights.resize(d);
    for (double& w : model.weights) w = rng.uniform(-0.01, 0.01);
    model.bias = 0;
  }
  model.threshold = options.threshold;
  model.training = {options.seed, options.epochs, options.learning_rate, options.l2, {}};

  for (int epoch = 0; epoch <= options.epochs; ++epoch) {
    auto lg = loss_and_gradient(model.weights, model.bias, data, options.l2);
    if (!std::isfinite(lg.loss)) fail(ErrorKind::DivergedLoss, "loss became non-finite at epoch " + std::to_string(epoch));
    model.training.loss_curve.push_back(lg.loss);
    if (epoch == options.epochs) break;
    for (std::size_t i = 0; i < d; ++i) model.weights[i] -= options.learning_rate * lg.gradient[i];
    model.bias -= options.learning_rate * lg.gradient[d];
  }
  for (double w : model.weights) {
    if (!std::isfinite(w)) fail(ErrorKind::DivergedLoss, "weights became non-finite");
  }
  return model;
}

double score(const ClassifierModel& model, const FeatureVector& features) {
  if (features.values.size() != model.weights.size()) fail(ErrorKind::DimensionMismatch, "feature length does not match the model");
  return sigmoid(dot(model.weights, features.values) + model.bias);
}

Prediction predict(const ClassifierModel& model, const FeatureVector& features, const std::string& sample_id) {
  Prediction p;
  p.sample_id = sample_id;
  p.score = score(model, features);
  p.label = p.score >= model.threshold ? dataset::Label::Vuln : dataset::Label::NonVuln;
  return p;
}

Json to_json(const ClassifierModel& m) {
  return Json{{"format", std::string(kModelFormat)},
              {"version", kModelVersion},
              {"dims", Json{{"text", m.dims.text}, {"code", m.dims.code}, {"cwe", m.dims.cwe}}},
              {"feature_config", m.feature_config},
              {"config_hash", m.config_hash},
              {"threshold", m.threshold},
              {"bias", m.bias},
              {"weights", m.weights},
              {"training",
               Json{{"seed", m.training.seed},
                    {"epochs", m.training.epochs},
                    {"learning_rate", m.training.learning_rate},
                    {"l2", m.training.l2},
                    {"loss_curve", m.training.loss_curve}}}};
}

ClassifierModel model_from_json(const Json& doc) {
  ClassifierModel m;
  try {
    if (doc.at("format").get<std::string>() != kModelFormat) fail(ErrorKind::MalformedRecord, "not a linear model file");
    if (doc.at("version").get<int>() != kModelVersion) fail(ErrorKind::MalformedRecord, "unsupported model version");
    const auto& dims = doc.at("dims");
    m.dims = {dims.at("text").get<std::size_t>(), dims.at("code").get<std::size_t>(), dims.at("cwe").get<std::size_t>()};
    m.feature_config = doc.value("feature_config", kAllFeatures);
    m.config_hash = doc.at("config_hash").get<std::string>();
    m.threshold = doc.at("threshold").get<double>();
    m.bias = doc.at("bias").get<double>();
    m.weights = doc.at("weights").get<std::vector<double>>();
    const auto& t = doc.at("training");
    m.training = {t.at("seed").get<std::uint64_t>(), t.at("epochs").get<int>(), t.at("learning_rate").get<double>(),
                  t.value("l2", 0.0), t.at("loss_curve").get<std::vector<double>>()};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedRecord, std::string("model file: ") + e.what());
  }
  if (m.weights.size() != m.dims.total()) fail(ErrorKind::DimensionMismatch, "model weights do not match its dimensions");
  for (double w : m.weights) {
    if (!std::isfinite(w)) fail(ErrorKind::MalformedRecord, "model has non-finite weights");
  }
  return m;
}

}  // namespace pcve::detector
