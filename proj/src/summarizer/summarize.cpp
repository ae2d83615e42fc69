#include "pcve/summarizer/summarize.hpp"

#include <algorithm>

#include "pcve/common/error.hpp"
#include "pcve/common/parallel.hpp"
#include "pcve/summarizer/code_detect.hpp"

namespace pcve::summarizer {

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string trimmed(std::string s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string generate_validated(TextGenerator& llm, const std::string& prompt, const SummarizerOptions& options) {
  std::string current = prompt;
  bool leaked = false;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    std::string reply = trimmed(llm.generate(current, options.max_output_tokens));
    if (blank(reply)) {
      leaked = false;
      continue;
    }
    if (!contains_source_code(reply)) return reply;
    leaked = true;
    current = prompt + std::string(kRetryAddendum);
  }
  if (leaked) fail(ErrorKind::CodeLeak, "summary still contains source code after " + std::to_string(options.max_retries) + " retries");
  fail(ErrorKind::EmptyResponse, "generator returned an empty summary");
}

std::string summarize_artifact(const github::Issue& artifact, TextGenerator& llm, const PromptSet& prompts,
                               const SummarizerOptions& options) {
  if (blank(artifact.title)) fail(ErrorKind::InvalidArgument, artifact.repo + "#" + std::to_string(artifact.number) + " has no title");
  std::vector<std::string> comments;
  for (const auto& c : artifact.comments) comments.push_back(truncate_to_budget(c.text, options.max_input_tokens));
  auto prompt = step1_prompt(prompts, truncate_to_budget(artifact.title, options.max_input_tokens),
                             truncate_to_budget(artifact.body, options.max_input_tokens), comments);
  return truncate_to_budget(generate_validated(llm, prompt, options), options.budget_tokens);
}

std::string aggregate_summaries(const std::vector<std::string>& summaries, TextGenerator& llm, const PromptSet& prompts,
                                const SummarizerOptions& options) {
  if (summaries.empty()) fail(ErrorKind::InvalidArgument, "nothing to aggregate");
  auto prompt = step2_prompt(prompts, summaries);
  return truncate_to_budget(generate_validated(llm, prompt, options), options.budget_tokens);
}

SummaryBundle summarize_discussions(std::span<const github::Issue> issues, std::span<const github::PullRequest> pulls,
                                    TextGenerator& llm, const PromptSet& prompts, const SummarizerOptions& options) {
  SummaryBundle bundle;
  for (const auto& i : issues) {
    bundle.per_artifact.push_back({i.repo + "#" + std::to_string(i.number), summarize_artifact(i, llm, prompts, options)});
  }
  for (const auto& p : pulls) {
    bundle.per_artifact.push_back({p.repo + "#" + std::to_string(p.number), summarize_artifact(p, llm, prompts, options)});
  }
  if (!bundle.per_artifact.empty()) {
    std::vector<std::string> texts;
    for (const auto& a : bundle.per_artifact) texts.push_back(a.summary);
    bundle.overall = aggregate_summaries(texts, llm, prompts, options);
  }
  bundle.token_count = count_tokens(bundle.overall);
  return bundle;
}

std::string commit_message_text(std::span<const github::Commit> commits, std::size_t budget_tokens) {
  std::string joined;
  for (const auto& c : commits) {
    if (!joined.empty()) joined += "\n";
    joined += c.message;
  }
  return truncate_to_budget(joined, budget_tokens);
}

SampleSummary summarize_sample(const dataset::DetectionSample& sample, TextGenerator& llm, const PromptSet& prompts,
                               const SummarizerOptions& options) {
  SampleSummary out;
  out.sample_id = sample.sample_id;
  out.discussion = summarize_discussions(sample.issues, sample.pulls, llm, prompts, options);
  out.commit_messages = commit_message_text(sample.commits, options.budget_tokens);
  return out;
}

std::vector<SampleSummary> summarize_all(std::span<const dataset::DetectionSample> samples, TextGenerator& llm,
                                         const PromptSet& prompts, const SummarizerOptions& options) {
  std::vector<SampleSummary> out(samples.size());
  parallel_for(samples.size(), options.parallelism,
               [&](std::size_t i) { out[i] = summarize_sample(samples[i], llm, prompts, options); });
  return out;
}

Json to_json(const SampleSummary& s) {
  Json per = Json::array();
  for (const auto& a : s.discussion.per_artifact) per.push_back(Json{{"artifact_ref", a.artifact_ref}, {"summary", a.summary}});
  return Json{{"sample_id", s.sample_id},
              {"per_artifact", std::move(per)},
              {"overall", s.discussion.overall},
              {"token_count", s.discussion.token_count},
              {"commit_messages", s.commit_messages}};
}

SampleSummary sample_summary_from_json(const Json& row) {
  try {
    SampleSummary s;
    s.sample_id = row.at("sample_id").get<std::string>();
    for (const auto& a : row.at("per_artifact")) {
      s.discussion.per_artifact.push_back({a.at("artifact_ref").get<std::string>(), a.at("summary").get<std::string>()});
    }
    s.discussion.overall = row.at("overall").get<std::string>();
    s.discussion.token_count = row.at("token_count").get<std::size_t>();
    s.commit_messages = row.value("commit_messages", std::string{});
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedRecord, std::string("summary row: ") + e.what());
  }
}

}  // namespace pcve::summarizer
