#include "pcve/summarizer/code_detect.hpp"

#include <array>
#include <cctype>
#include <string>

namespace pcve::summarizer {

namespace {

constexpr std::array<std::string_view, 40> kKeywords{
    "if",    "else",    "for",      "while",    "return", "int",     "void",    "char",    "static", "struct",
    "class", "public",  "private",  "new",      "NULL",   "nullptr", "const",   "unsigned", "sizeof", "malloc",
    "free",  "printf",  "std",      "import",   "package", "try",    "catch",   "throw",   "null",   "bool",
    "auto",  "switch",  "case",     "break",    "continue", "typedef", "memcpy", "size_t", "final",  "throws"};

constexpr std::array<std::string_view, 8> kOperators{"->", "::", "==", "!=", "&&", "||", "++", "+="};

bool is_ident(unsigned char c) { return std::isalnum(c) || c == '_'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_keyword(std::string_view word) {
  for (auto k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

}  // namespace

LineScore score_line(std::string_view raw) {
  LineScore s;
  std::string_view line = trim(raw);
  if (line.empty()) return s;
  if (line.starts_with("#include") || line.starts_with("#define") || line.starts_with("#ifdef") || line.starts_with("#endif")) {
    s.structural += 3;
  }
  if (line.starts_with("//") || line.starts_with("/*") || line.ends_with("*/")) s.structural += 1;
  if (line.back() == ';' || line.back() == '{' || line.back() == '}') s.structural += 1;

  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '{' || c == '}') ++s.structural;
    if (c == ';' && i + 1 < line.size() && (line[i + 1] == '}' || line[i + 1] == ')' || std::isspace(static_cast<unsigned char>(line[i + 1]))) &&
        i > 0 && (line[i - 1] == ')' || line[i - 1] == ']')) {
      ++s.structural;  // "f(x); g(y)" style, not a prose semicolon
    }
    if (c == '(' && i > 0 && is_ident(static_cast<unsigned char>(line[i - 1]))) ++s.calls;
  }
  for (auto op : kOperators) {
    for (auto pos = line.find(op); pos != std::string_view::npos; pos = line.find(op, pos + op.size())) ++s.structural;
  }
  // Assignment-shaped "x = y" with an identifier on the left counts too.
  for (std::size_t i = 1; i + 1 < line.size(); ++i) {
    if (line[i] == '=' && line[i - 1] != '=' && line[i + 1] != '=' && line[i - 1] != '!' && line[i - 1] != '<' &&
        line[i - 1] != '>') {
      std::size_t j = i;
      while (j > 0 && line[j - 1] == ' ') --j;
      if (j > 0 && (is_ident(static_cast<unsigned char>(line[j - 1])) || line[j - 1] == ']') && j != i) {
        ++s.structural;
        break;
      }
    }
  }

  for (std::size_t i = 0; i < line.size();) {
    if (!is_ident(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && is_ident(static_cast<unsigned char>(line[j]))) ++j;
    if (is_keyword(line.substr(i, j - i))) s.keyword = true;
    i = j;
  }
  return s;
}

bool contains_source_code(std::string_view text) {
  std::size_t statement_lines = 0, nonempty = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    std::string_view t = trim(line);
    if (t.starts_with("```") || t.starts_with("~~~")) return true;
    if (!t.empty()) {
      ++nonempty;
      auto s = score_line(t);
      if (s.structural >= 3 || (s.structural >= 2 && (s.keyword || s.calls > 0))) return true;
      if (t.back() == ';' || t.back() == '{' || t.back() == '}') ++statement_lines;
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return statement_lines >= 3 && statement_lines * 10 >= nonempty * 3;
}

}  // namespace pcve::summarizer
