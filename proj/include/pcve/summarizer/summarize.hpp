#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pcve/common/io.hpp"
#include "pcve/dataset/sample.hpp"
#include "pcve/github/artifacts.hpp"
#include "pcve/summarizer/generator.hpp"
#include "pcve/summarizer/prompts.hpp"
#include "pcve/summarizer/tokens.hpp"

namespace pcve::summarizer {

struct SummarizerOptions {
  int max_retries = 2;                     // extra attempts after a code leak or empty reply
  std::size_t budget_tokens = kDefaultBudget;
  std::size_t max_output_tokens = 256;     // passed to the generator
  std::size_t max_input_tokens = 6000;     // per title/body/comment field sent to the generator
  std::size_t parallelism = 8;
};

inline constexpr std::string_view kRetryAddendum =
    "\n\nYour previous answer contained source code. Answer again in plain prose with no source code.";

struct ArtifactSummary {
  std::string artifact_ref;
  std::string summary;
};

struct SummaryBundle {
  std::vector<ArtifactSummary> per_artifact;
  std::string overall;
  std::size_t token_count = 0;  // stand-in tokens in `overall`
};

// Text inputs for one detection sample: the two-step discussion summary and
// the commit messages, kept apart so feature configurations can pick either.
struct SampleSummary {
  std::string sample_id;
  SummaryBundle discussion;
  std::string commit_messages;  // within budget
};

// Runs `prompt` until the reply is non-empty and code-free.
std::string generate_validated(TextGenerator& llm, const std::string& prompt, const SummarizerOptions& options);

std::string summarize_artifact(const github::Issue& artifact, TextGenerator& llm, const PromptSet& prompts,
                               const SummarizerOptions& options = {});
std::string aggregate_summaries(const std::vector<std::string>& summaries, TextGenerator& llm, const PromptSet& prompts,
                                const SummarizerOptions& options = {});

SummaryBundle summarize_discussions(std::span<const github::Issue> issues, std::span<const github::PullRequest> pulls,
                                    TextGenerator& llm, const PromptSet& prompts, const SummarizerOptions& options = {});

std::string commit_message_text(std::span<const github::Commit> commits, std::size_t budget_tokens = kDefaultBudget);

SampleSummary summarize_sample(const dataset::DetectionSample& sample, TextGenerator& llm, const PromptSet& prompts,
                               const SummarizerOptions& options = {});
std::vector<SampleSummary> summarize_all(std::span<const dataset::DetectionSample> samples, TextGenerator& llm,
                                         const PromptSet& prompts, const SummarizerOptions& options = {});

Json to_json(const SampleSummary& summary);
SampleSummary sample_summary_from_json(const Json& row);

}  // namespace pcve::summarizer
