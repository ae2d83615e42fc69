#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcve/dataset/diff.hpp"
#include "pcve/dataset/sample.hpp"
#include "pcve/detector/cwe.hpp"
#include "pcve/detector/encoder.hpp"
#include "pcve/summarizer/summarize.hpp"

namespace pcve::detector {

// Which inputs feed the classifier. The text block averages the embeddings of
// the enabled text sources.
struct AblationConfig {
  std::string name;
  bool issue_pr = true;
  bool commit_message = true;
  bool code = true;
  bool cwe = true;

  bool text_active() const { return issue_pr || commit_message; }
  friend bool operator==(const AblationConfig&, const AblationConfig&) = default;
};

inline const std::string kAllFeatures = "All Features";

// "Code", "Issue + PR", "Commit (Msg + Diff)", "Issue + PR + Commit Msg", "All Features".
const std::vector<AblationConfig>& table6_configs();
AblationConfig ablation_config(std::string_view name);

struct FeatureDims {
  std::size_t text = 768;
  std::size_t code = 768;
  std::size_t cwe = 16;

  std::size_t total() const { return text + code + cwe; }
  friend bool operator==(const FeatureDims&, const FeatureDims&) = default;
};

struct FeatureVector {
  std::vector<double> values;  // [text | code | cwe]
  FeatureDims dims;
  std::array<bool, 3> mask{true, true, true};  // active blocks
};

FeatureVector fuse(const EmbeddingVector& text_vec, const EmbeddingVector& code_vec, std::span<const double> cwe_vec,
                   const AblationConfig& ablation, const FeatureDims& dims);

// Per-sample embeddings computed once and shared by every configuration.
struct SampleEmbeddings {
  std::string sample_id;
  EmbeddingVector discussion;
  EmbeddingVector commit_message;
  EmbeddingVector code;
};

struct FeatureContext {
  const Encoder& text_encoder;
  const Encoder& code_encoder;
  const CweAnchorStore& anchors;
  const dataset::FunctionSplitter& splitter;
  FeatureDims dims;
};

SampleEmbeddings embed_sample(const dataset::DetectionSample& sample, const summarizer::SampleSummary& summary,
                              const FeatureContext& context);
FeatureVector assemble(const SampleEmbeddings& embeddings, const AblationConfig& ablation, const FeatureContext& context);

}  // namespace pcve::detector
