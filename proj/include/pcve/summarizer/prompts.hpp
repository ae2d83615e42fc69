#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcve::summarizer {

struct PromptSet {
  std::string summarize_step1;
  std::string summarize_step2;
  std::string zero_shot_classify;
};

// Built-in templates, or the files summarize_step1.txt, summarize_step2.txt
// and zero_shot_classify.txt from `dir` where present.
PromptSet load_prompts(const std::optional<std::filesystem::path>& dir = std::nullopt);
const PromptSet& builtin_prompts();

// Replaces each placeholder in one left-to-right pass, so placeholder-like
// text inside the values is left alone.
std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

std::string step1_prompt(const PromptSet& prompts, std::string_view title, std::string_view body,
                         const std::vector<std::string>& comments);
std::string step2_prompt(const PromptSet& prompts, const std::vector<std::string>& summaries);

struct ClassifyBundle {
  std::optional<std::string> pr_text;
  std::optional<std::string> issue_text;
  std::optional<std::string> commit_message;
  std::optional<std::string> commit_diff;

  bool empty() const { return !pr_text && !issue_text && !commit_message && !commit_diff; }
};

inline constexpr std::string_view kNotAvailable = "Not available.";

std::string zero_shot_prompt(const PromptSet& prompts, const ClassifyBundle& bundle);

}  // namespace pcve::summarizer
