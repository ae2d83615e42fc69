#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pcve::summarizer {

inline constexpr std::size_t kDefaultBudget = 512;
// Stand-in tokens undercount subword tokens, so only this share of the
// encoder budget is spent.
inline constexpr double kSafetyFactor = 0.75;

struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Runs of letters, digits, underscores and non-ASCII bytes form one token;
// every other non-space character is a token by itself.
std::vector<TokenSpan> tokenize(std::string_view text);
std::size_t count_tokens(std::string_view text);

std::size_t budget_capacity(std::size_t budget_tokens);

// Longest prefix ending on a token boundary that fits the budget capacity.
std::string truncate_to_budget(std::string_view text, std::size_t budget_tokens = kDefaultBudget);
bool within_budget(std::string_view text, std::size_t budget_tokens = kDefaultBudget);

}  // namespace pcve::summarizer
