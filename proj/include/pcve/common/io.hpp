#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace pcve {

using Json = nlohmann::ordered_json;

// Reads a whole file; transparently inflates gzip content (by magic bytes).
std::string read_file(const std::filesystem::path& path);

// Writes through a sibling temp file and renames over the target, so readers
// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::vector<Json> read_jsonl(const std::filesystem::path& path);
void write_jsonl_atomic(const std::filesystem::path& path, const std::vector<Json>& rows);

// Line-oriented JSON encoding: compact, UTF-8, insertion-ordered keys.
std::string to_jsonl_line(const Json& row);

Json parse_json(std::string_view text, std::string_view what);

// Minimal RFC 4180 field quoting.
std::string csv_field(std::string_view value);
std::string csv_row(const std::vector<std::string>& fields);

std::string format_fixed(double value, int decimals);

}  // namespace pcve
