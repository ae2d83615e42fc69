#include "pcve/summarizer/tokens.hpp"

#include <cctype>
#include <cmath>

#include "pcve/common/error.hpp"

namespace pcve::summarizer {

namespace {

bool is_word(unsigned char c) { return c >= 0x80 || std::isalnum(c) || c == '_'; }

}  // namespace

std::vector<TokenSpan> tokenize(std::string_view text) {
  std::vector<TokenSpan> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (is_word(c)) {
      while (j < text.size() && is_word(static_cast<unsigned char>(text[j]))) ++j;
    }
    spans.push_back({i, j});
    i = j;
  }
  return spans;
}

std::size_t count_tokens(std::string_view text) { return tokenize(text).size(); }

std::size_t budget_capacity(std::size_t budget_tokens) {
  if (budget_tokens < 1) fail(ErrorKind::InvalidArgument, "token budget must be at least 1");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(budget_tokens) * kSafetyFactor)));
}

std::string truncate_to_budget(std::string_view text, std::size_t budget_tokens) {
  const std::size_t capacity = budget_capacity(budget_tokens);
  auto spans = tokenize(text);
  if (spans.size() <= capacity) return std::string(text);
  return std::string(text.substr(0, spans[capacity - 1].end));
}

bool within_budget(std::string_view text, std::size_t budget_tokens) { return count_tokens(text) <= budget_capacity(budget_tokens); }

}  // namespace pcve::summarizer
