#include "pcve/evaluator/ablation.hpp"

#include <map>

#include "pcve/common/error.hpp"
#include "pcve/evaluator/metrics.hpp"

namespace pcve::evaluator {

ConfigRun run_config(const LabeledEmbeddings& data, const std::vector<std::string>& train_ids,
                     const std::vector<std::string>& test_ids, const detector::AblationConfig& config,
                     const detector::FeatureContext& context, const detector::TrainOptions& options) {
  if (data.embeddings.size() != data.labels.size()) fail(ErrorKind::InvalidArgument, "embeddings and labels differ in length");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < data.embeddings.size(); ++i) index[data.embeddings[i].sample_id] = i;
  auto lookup = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) fail(ErrorKind::JoinFailure, "no embeddings for sample " + id);
    return it->second;
  };

  std::vector<detector::FeatureVector> train_x;
  std::vector<int> train_y;
  for (const auto& id : train_ids) {
    auto i = lookup(id);
    train_x.push_back(detector::assemble(data.embeddings[i], config, context));
    train_y.push_back(data.labels[i]);
  }
  ConfigRun run;
  run.model = detector::train({train_x, train_y}, options);
  run.model.feature_config = config.name;
  for (const auto& id : test_ids) {
    auto i = lookup(id);
    run.test_ids.push_back(id);
    run.test_scores.push_back(detector::score(run.model, detector::assemble(data.embeddings[i], config, context)));
    run.test_labels.push_back(data.labels[i]);
  }
  run.auc = roc_auc(run.test_scores, run.test_labels);
  return run;
}

std::vector<AblationResult> ablation_sweep(const LabeledEmbeddings& data, const dataset::SplitManifest& split,
                                           std::span<const detector::AblationConfig> configs,
                                           const detector::FeatureContext& context, const detector::TrainOptions& options) {
  std::vector<AblationResult> out;
  std::optional<double> all_auc;
  for (const auto& c : configs) {
    auto run = run_config(data, split.train_ids, split.test_ids, c, context, options);
    out.push_back({c.name, run.auc, std::nullopt});
    if (c.name == detector::kAllFeatures) all_auc = run.auc;
  }
  if (all_auc) {
    for (auto& r : out) r.delta_auc = *all_auc - r.auc;
  }
  return out;
}

std::string ablation_csv(std::span<const AblationResult> results) {
  std::string out = "config,auc,delta_auc\n";
  for (const auto& r : results) {
    out += csv_row({r.config, format_fixed(r.auc, 4), r.delta_auc ? format_fixed(*r.delta_auc, 4) : std::string{}});
  }
  return out;
}

}  // namespace pcve::evaluator
