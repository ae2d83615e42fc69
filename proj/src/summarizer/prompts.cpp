#include "pcve/summarizer/prompts.hpp"

#include "pcve/common/error.hpp"
#include "pcve/common/io.hpp"
#include "pcve/embedded_prompts.hpp"

namespace pcve::summarizer {

namespace {

// Template files end with a newline that is not part of the prompt.
std::string strip_final_newline(std::string_view text) {
  if (!text.empty() && text.back() == '\n') text.remove_suffix(1);
  return std::string(text);
}

}  // namespace

const PromptSet& builtin_prompts() {
  static const PromptSet set{strip_final_newline(embedded::summarize_step1), strip_final_newline(embedded::summarize_step2),
                             strip_final_newline(embedded::zero_shot_classify)};
  return set;
}

PromptSet load_prompts(const std::optional<std::filesystem::path>& dir) {
  PromptSet set = builtin_prompts();
  if (!dir) return set;
  auto load = [&](const char* name, std::string& slot) {
    auto path = *dir / name;
    if (std::filesystem::exists(path)) slot = strip_final_newline(read_file(path));
  };
  load("summarize_step1.txt", set.summarize_step1);
  load("summarize_step2.txt", set.summarize_step2);
  load("zero_shot_classify.txt", set.zero_shot_classify);
  return set;
}

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t best = std::string_view::npos;
    const std::pair<const std::string, std::string>* hit = nullptr;
    for (const auto& kv : values) {
      auto at = tmpl.find(kv.first, pos);
      if (at < best) {
        best = at;
        hit = &kv;
      }
    }
    if (!hit) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, best - pos));
    out.append(hit->second);
    pos = best + hit->first.size();
  }
  return out;
}

std::string step1_prompt(const PromptSet& prompts, std::string_view title, std::string_view body,
                         const std::vector<std::string>& comments) {
  std::string joined;
  for (const auto& c : comments) {
    if (!joined.empty()) joined += "\n";
    joined += c;
  }
  return fill_template(prompts.summarize_step1,
                       {{"<TITLE>", std::string(title)}, {"<BODY>", std::string(body)}, {"<COMMENTS>", joined}});
}

std::string step2_prompt(const PromptSet& prompts, const std::vector<std::string>& summaries) {
  if (summaries.empty()) fail(ErrorKind::InvalidArgument, "step-2 prompt needs at least one summary");
  std::string joined;
  for (const auto& s : summaries) {
    if (!joined.empty()) joined += "\n\n";
    joined += s;
  }
  return fill_template(prompts.summarize_step2, {{"<STEP_1_SUMMARY_COLLECTION>", joined}});
}

std::string zero_shot_prompt(const PromptSet& prompts, const ClassifyBundle& bundle) {
  if (bundle.empty()) fail(ErrorKind::InvalidArgument, "classification bundle is empty");
  auto or_na = [](const std::optional<std::string>& v) { return v ? *v : std::string(kNotAvailable); };
  return fill_template(prompts.zero_shot_classify, {{"<PR text, if available>", or_na(bundle.pr_text)},
                                                    {"<Issue text, if available>", or_na(bundle.issue_text)},
                                                    {"<Commit message, if available>", or_na(bundle.commit_message)},
                                                    {"<Commit diff, if available>", or_na(bundle.commit_diff)}});
}

}  // namespace pcve::summarizer
