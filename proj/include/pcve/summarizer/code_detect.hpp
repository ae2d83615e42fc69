#pragma once

#include <string_view>

namespace pcve::summarizer {

struct LineScore {
  int structural = 0;  // braces, statement-ending semicolons, code operators, preprocessor lines
  int calls = 0;       // identifier immediately followed by "("
  bool keyword = false;
};

LineScore score_line(std::string_view line);

// True on any fenced block (``` or ~~~), on any single line that scores as
// code, or when several lines end like statements.
bool contains_source_code(std::string_view text);

}  // namespace pcve::summarizer
