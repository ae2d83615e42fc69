#include "pcve/pipeline/toml.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <cstdlib>

#include "pcve/common/error.hpp"

namespace pcve::pipeline {

std::string TomlValue::describe() const {
  struct V {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return std::to_string(d); }
    std::string operator()(const std::string& s) const { return "\"" + s + "\""; }
    std::string operator()(const Array& a) const {
      std::string out = "[";
      for (std::size_t i = 0; i < a.size(); ++i) out += (i ? ", " : "") + a[i].describe();
      return out + "]";
    }
  };
  return std::visit(V{}, value);
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

std::string interpolate(std::string_view text, const EnvLookup& env) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto open = text.find("${", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    auto close = text.find('}', open);
    if (close == std::string_view::npos) fail(ErrorKind::ConfigInvalid, "unterminated ${ in config value");
    out.append(text.substr(pos, open - pos));
    std::string_view inner = text.substr(open + 2, close - open - 2);
    std::string name(inner), fallback;
    bool has_fallback = false;
    if (auto sep = inner.find(":-"); sep != std::string_view::npos) {
      name = std::string(inner.substr(0, sep));
      fallback = std::string(inner.substr(sep + 2));
      has_fallback = true;
    }
    auto v = env(name);
    out += v && !(has_fallback && v->empty()) ? *v : fallback;
    pos = close + 1;
  }
  return out;
}

namespace {

class Parser {
public:
  Parser(std::string_view text, const EnvLookup& env) : text_(text), env_(env) {}

  TomlTable document() {
    TomlTable table;
    std::string prefix;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        skip_spaces();
        prefix = dotted_key();
        skip_spaces();
        expect(']');
        end_of_line();
        if (!tables_.insert(prefix).second) error("table [" + prefix + "] defined twice");
        continue;
      }
      std::string key = dotted_key();
      skip_spaces();
      expect('=');
      skip_spaces();
      TomlValue v = value();
      end_of_line();
      std::string full = prefix.empty() ? key : prefix + "." + key;
      if (!table.emplace(full, std::move(v)).second) error("duplicate key " + full);
    }
    return table;
  }

  TomlValue single_value() {
    skip_spaces();
    TomlValue v = value();
    skip_spaces();
    if (!at_end()) error("trailing characters after value");
    return v;
  }

private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::ConfigInvalid, "config line " + std::to_string(line_) + ": " + msg);
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void expect(char c) {
    if (peek() != c) error(std::string("expected '") + c + "'");
    ++pos_;
  }
  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
  }
  void skip_blank_lines() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      break;
    }
  }
  // Inside arrays newlines and comments are whitespace.
  void skip_array_space() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\r' || peek() == '\n') {
        if (peek() == '\n') ++line_;
        ++pos_;
        continue;
      }
      break;
    }
  }
  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (at_end()) return;
    if (peek() != '\n') error("unexpected text at end of line");
    ++pos_;
    ++line_;
  }

  std::string bare_key() {
    std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (start == pos_) {
      if (peek() == '"') return basic_string();
      error("expected a key");
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string dotted_key() {
    std::string key = bare_key();
    while (true) {
      skip_spaces();
      if (peek() != '.') break;
      ++pos_;
      skip_spaces();
      key += "." + bare_key();
    }
    return key;
  }

  std::string basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') error("unterminated string");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) error("unterminated escape");
      char e = text_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: error(std::string("unsupported escape \\") + e);
      }
    }
    return out;
  }

  std::string literal_string() {
    expect('\'');
    auto close = text_.find('\'', pos_);
    auto nl = text_.find('\n', pos_);
    if (close == std::string_view::npos || (nl != std::string_view::npos && nl < close)) error("unterminated literal string");
    std::string out(text_.substr(pos_, close - pos_));
    pos_ = close + 1;
    return out;
  }

  TomlValue value() {
    char c = peek();
    if (c == '"') return {interpolate(basic_string(), env_)};
    if (c == '\'') return {literal_string()};
    if (c == '[') {
      ++pos_;
      TomlValue::Array items;
      skip_array_space();
      while (peek() != ']') {
        items.push_back(value());
        skip_array_space();
        if (peek() == ',') {
          ++pos_;
          skip_array_space();
        } else if (peek() != ']') {
          error("expected ',' or ']' in array");
        }
      }
      ++pos_;
      return {std::move(items)};
    }
    std::size_t start = pos_;
    while (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' && peek() != ']' && peek() != '#') ++pos_;
    std::string token(text_.substr(start, pos_ - start));
    if (token == "true") return {true};
    if (token == "false") return {false};
    std::string digits;
    for (char ch : token) {
      if (ch != '_') digits += ch;
    }
    if (digits.empty()) error("expected a value");
    bool is_float = digits.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      std::int64_t i = 0;
      auto [p, ec] = std::from_chars(digits.data() + (digits[0] == '+'), digits.data() + digits.size(), i);
      if (ec == std::errc() && p == digits.data() + digits.size()) return {i};
    } else {
      char* end = nullptr;
      double d = std::strtod(digits.c_str(), &end);
      if (end == digits.c_str() + digits.size()) return {d};
    }
    error("cannot read value '" + token + "'");
  }

  std::string_view text_;
  const EnvLookup& env_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::set<std::string> tables_;
};

}  // namespace

TomlTable parse_toml(std::string_view text, const EnvLookup& env) { return Parser(text, env).document(); }

TomlValue parse_toml_value(std::string_view text, const EnvLookup& env) { return Parser(text, env).single_value(); }

}  // namespace pcve::pipeline
