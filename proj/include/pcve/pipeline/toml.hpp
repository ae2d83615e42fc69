#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pcve::pipeline {

// The part of TOML the config needs: [table] and [a.b] headers, key = value
// with basic/literal strings, integers, floats, booleans and flat arrays of
// those, plus comments. No inline tables, dates or multi-line strings.
struct TomlValue {
  using Array = std::vector<TomlValue>;
  std::variant<bool, std::int64_t, double, std::string, Array> value;

  bool is_string() const { return std::holds_alternative<std::string>(value); }
  std::string describe() const;
  friend bool operator==(const TomlValue&, const TomlValue&) = default;
};

// Keys flattened as "table.key".
using TomlTable = std::map<std::string, TomlValue>;

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

// "${NAME}" and "${NAME:-fallback}" inside strings are replaced from `env`;
// an unset name without a fallback becomes "".
std::string interpolate(std::string_view text, const EnvLookup& env);

// Throws ConfigInvalid with a line number on syntax errors or duplicate keys.
TomlTable parse_toml(std::string_view text, const EnvLookup& env = process_env());
TomlValue parse_toml_value(std::string_view text, const EnvLookup& env = process_env());

}  // namespace pcve::pipeline
