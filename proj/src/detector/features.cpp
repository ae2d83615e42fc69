#include "pcve/detector/features.hpp"

#include "pcve/common/error.hpp"

namespace pcve::detector {

const std::vector<AblationConfig>& table6_configs() {
  static const std::vector<AblationConfig> configs{
      {"Code", false, false, true, false},
      {"Issue + PR", true, false, false, false},
      {"Commit (Msg + Diff)", false, true, true, false},
      {"Issue + PR + Commit Msg", true, true, false, false},
      {kAllFeatures, true, true, true, true},
  };
  return configs;
}

AblationConfig ablation_config(std::string_view name) {
  for (const auto& c : table6_configs()) {
    if (c.name == name) return c;
  }
  fail(ErrorKind::ConfigInvalid, "unknown feature configuration: " + std::string(name));
}

FeatureVector fuse(const EmbeddingVector& text_vec, const EmbeddingVector& code_vec, std::span<const double> cwe_vec,
                   const AblationConfig& ablation, const FeatureDims& dims) {
  if (text_vec.dim() != dims.text) fail(ErrorKind::DimensionMismatch, "text block has the wrong dimension");
  if (code_vec.dim() != dims.code) fail(ErrorKind::DimensionMismatch, "code block has the wrong dimension");
  if (cwe_vec.size() != dims.cwe) fail(ErrorKind::DimensionMismatch, "CWE block has the wrong dimension");
  FeatureVector f;
  f.dims = dims;
  f.mask = {ablation.text_active(), ablation.code, ablation.cwe};
  f.values.assign(dims.total(), 0.0);
  auto put = [&](std::size_t offset, std::span<const double> block, bool active) {
    if (!active) return;
    std::copy(block.begin(), block.end(), f.values.begin() + static_cast<std::ptrdiff_t>(offset));
  };
  put(0, text_vec.values, f.mask[0]);
  put(dims.text, code_vec.values, f.mask[1]);
  put(dims.text + dims.code, cwe_vec, f.mask[2]);
  return f;
}

SampleEmbeddings embed_sample(const dataset::DetectionSample& sample, const summarizer::SampleSummary& summary,
                              const FeatureContext& context) {
  if (summary.sample_id != sample.sample_id) fail(ErrorKind::JoinFailure, "summary does not belong to " + sample.sample_id);
  SampleEmbeddings e;
  e.sample_id = sample.sample_id;
  e.discussion = encode_text(summary.discussion.overall, context.text_encoder);
  e.commit_message = encode_text(summary.commit_messages, context.text_encoder);
  e.code = encode_code(sample.commits, context.code_encoder, context.splitter);
  return e;
}

FeatureVector assemble(const SampleEmbeddings& e, const AblationConfig& ablation, const FeatureContext& context) {
  std::vector<EmbeddingVector> texts;
  if (ablation.issue_pr) texts.push_back(e.discussion);
  if (ablation.commit_message) texts.push_back(e.commit_message);
  EmbeddingVector text = texts.empty() ? EmbeddingVector{std::vector<double>(context.dims.text, 0.0), EmbeddingSource::Text}
                                       : mean_pool(texts);
  std::vector<double> cwe(context.dims.cwe, 0.0);
  if (ablation.cwe) cwe = cwe_features(text, context.anchors, context.dims.cwe);
  return fuse(text, e.code, cwe, ablation, context.dims);
}

}  // namespace pcve::detector
