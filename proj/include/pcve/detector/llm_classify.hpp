#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "pcve/dataset/sample.hpp"
#include "pcve/detector/classifier.hpp"
#include "pcve/summarizer/generator.hpp"
#include "pcve/summarizer/prompts.hpp"

namespace pcve::detector {

struct ParsedVerdict {
  bool vulnerable = false;
  std::string justification;
};

// Reads "Answer: Yes|No" and the "Justification:" line; nullopt otherwise.
std::optional<ParsedVerdict> parse_verdict(std::string_view response);

// Zero-shot verdict. One retry on an unparseable reply, then
// UnparseableResponse. Score is 1 for Yes and 0 for No.
Prediction llm_classify(const summarizer::ClassifyBundle& bundle, summarizer::TextGenerator& llm,
                        const summarizer::PromptSet& prompts, const std::string& sample_id = {});

// Raw artifact text for a sample, each field truncated to `max_field_tokens`.
summarizer::ClassifyBundle classify_bundle(const dataset::DetectionSample& sample, std::size_t max_field_tokens = 6000);

}  // namespace pcve::detector
