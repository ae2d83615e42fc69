#include "pcve/detector/llm_classify.hpp"

#include <regex>

#include "pcve/common/error.hpp"
#include "pcve/dataset/diff.hpp"
#include "pcve/summarizer/tokens.hpp"

namespace pcve::detector {

std::optional<ParsedVerdict> parse_verdict(std::string_view response) {
  static const std::regex answer_re(R"(Answer:\s*(Yes|No)\b)", std::regex::icase);
  static const std::regex justification_re(R"(Justification:[ \t]*([^\r\n]*))", std::regex::icase);
  std::string text(response);
  std::smatch m;
  if (!std::regex_search(text, m, answer_re)) return std::nullopt;
  ParsedVerdict v;
  char first = m[1].str().front();
  v.vulnerable = first == 'Y' || first == 'y';
  if (std::regex_search(text, m, justification_re)) v.justification = m[1].str();
  return v;
}

Prediction llm_classify(const summarizer::ClassifyBundle& bundle, summarizer::TextGenerator& llm,
                        const summarizer::PromptSet& prompts, const std::string& sample_id) {
  auto prompt = summarizer::zero_shot_prompt(prompts, bundle);
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto verdict = parse_verdict(llm.generate(prompt, 128));
    if (!verdict) continue;
    Prediction p;
    p.sample_id = sample_id;
    p.score = verdict->vulnerable ? 1.0 : 0.0;
    p.label = verdict->vulnerable ? dataset::Label::Vuln : dataset::Label::NonVuln;
    p.justification = verdict->justification;
    return p;
  }
  fail(ErrorKind::UnparseableResponse, "no Yes/No answer in the model reply");
}

summarizer::ClassifyBundle classify_bundle(const dataset::DetectionSample& sample, std::size_t max_field_tokens) {
  auto join_discussion = [&](const auto& items) -> std::optional<std::string> {
    if (items.empty()) return std::nullopt;
    std::string text;
    for (const auto& i : items) {
      if (!text.empty()) text += "\n\n";
      text += i.title + "\n" + i.body;
      for (const auto& c : i.comments) text += "\n" + c.text;
    }
    return summarizer::truncate_to_budget(text, max_field_tokens);
  };
  summarizer::ClassifyBundle b;
  b.pr_text = join_discussion(sample.pulls);
  b.issue_text = join_discussion(sample.issues);
  if (!sample.commits.empty()) {
    std::string messages, diffs;
    for (const auto& c : sample.commits) {
      if (!messages.empty()) messages += "\n";
      messages += c.message;
      diffs += dataset::commit_diff_text(c);
    }
    b.commit_message = summarizer::truncate_to_budget(messages, max_field_tokens);
    b.commit_diff = summarizer::truncate_to_budget(diffs, max_field_tokens);
  }
  return b;
}

}  // namespace pcve::detector
