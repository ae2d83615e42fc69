#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pcve/dataset/language.hpp"
#include "pcve/github/artifacts.hpp"

namespace pcve::dataset {

struct LineRange {
  std::uint64_t start = 0;
  std::uint64_t count = 0;

  friend bool operator==(const LineRange&, const LineRange&) = default;
};

// One "@@" block plus whatever file-header lines came directly before it.
// preamble/header/body keep the original lines so serialization is exact.
struct Hunk {
  std::string file_path;  // from the nearest preceding header, may be empty
  LineRange old_range;
  LineRange new_range;
  std::string section;  // text after the closing "@@"
  std::vector<std::string> added_lines;
  std::vector<std::string> removed_lines;

  std::vector<std::string> preamble;
  std::string header;
  std::vector<std::string> body;
  bool ends_with_newline = true;  // only meaningful on the last hunk

  friend bool operator==(const Hunk&, const Hunk&) = default;
};

// Throws MalformedDiff when line counts disagree with hunk headers or when
// non-header text appears outside a hunk. Header-only text yields no hunks.
std::vector<Hunk> parse_unified_diff(std::string_view diff_text);
std::string serialize_hunks(const std::vector<Hunk>& hunks);

// Full diff text for a commit: a git-style file header per file followed by
// the file's hunks.
std::string commit_diff_text(const github::Commit& commit, bool supported_only = true);

struct CodeUnit {
  std::string path;
  Language language = Language::Unsupported;
  std::string text;
};

// Port for splitting a commit's changes into code units. The default uses
// diff hunks; a function-level splitter can be attached instead.
class FunctionSplitter {
public:
  virtual ~FunctionSplitter() = default;
  virtual std::vector<CodeUnit> split(const github::Commit& commit) const = 0;
};

class HunkSplitter final : public FunctionSplitter {
public:
  std::vector<CodeUnit> split(const github::Commit& commit) const override;
};

}  // namespace pcve::dataset
