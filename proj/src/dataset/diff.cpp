#include "pcve/dataset/diff.hpp"

#include <charconv>
#include <optional>
#include <regex>

#include "pcve/common/error.hpp"

namespace pcve::dataset {

namespace {

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

bool is_file_header(std::string_view line) {
  static constexpr std::string_view kPrefixes[] = {
      "diff ", "index ", "--- ", "+++ ", "new file mode", "deleted file mode", "old mode", "new mode",
      "similarity index", "dissimilarity index", "rename from", "rename to", "copy from", "copy to", "Binary files"};
  for (auto p : kPrefixes) {
    if (starts_with(line, p)) return true;
  }
  return false;
}

std::uint64_t to_u64(const std::ssub_match& m, std::uint64_t fallback) {
  if (!m.matched) return fallback;
  std::uint64_t v = 0;
  auto s = m.str();
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

std::string path_from_header(std::string_view line) {
  std::string_view rest;
  if (starts_with(line, "+++ ")) rest = line.substr(4);
  else if (starts_with(line, "--- ")) rest = line.substr(4);
  else if (starts_with(line, "diff --git ")) {
    auto pos = line.rfind(" b/");
    return pos == std::string_view::npos ? std::string{} : std::string(line.substr(pos + 3));
  } else return {};
  if (rest == "/dev/null") return {};
  if (starts_with(rest, "a/") || starts_with(rest, "b/")) rest = rest.substr(2);
  auto tab = rest.find('\t');
  if (tab != std::string_view::npos) rest = rest.substr(0, tab);
  return std::string(rest);
}

}  // namespace

std::vector<Hunk> parse_unified_diff(std::string_view text) {
  std::vector<Hunk> hunks;
  if (text.empty()) return hunks;

  std::vector<std::string> lines;
  bool trailing_newline = text.back() == '\n';
  std::string_view rest = trailing_newline ? text.substr(0, text.size() - 1) : text;
  for (std::size_t pos = 0;;) {
    auto nl = rest.find('\n', pos);
    lines.emplace_back(rest.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }

  static const std::regex header_re(R"(^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@(.*)$)");
  std::vector<std::string> pending;  // header lines awaiting the next hunk
  std::string current_path;
  std::size_t i = 0;
  while (i < lines.size()) {
    const std::string& line = lines[i];
    std::smatch m;
    if (!std::regex_match(line, m, header_re)) {
      if (!is_file_header(line)) {
        fail(ErrorKind::MalformedDiff, "unexpected line " + std::to_string(i + 1) + " outside a hunk");
      }
      if (auto p = path_from_header(line); !p.empty()) {
        // "+++" wins over "---" and "diff --git" since it names the new file.
        if (starts_with(line, "+++ ") || current_path.empty() || starts_with(line, "diff ")) current_path = p;
      }
      pending.push_back(line);
      ++i;
      continue;
    }
    Hunk h;
    h.file_path = current_path;
    h.old_range = {to_u64(m[1], 0), to_u64(m[2], 1)};
    h.new_range = {to_u64(m[3], 0), to_u64(m[4], 1)};
    h.section = m[5].str();
    if (!h.section.empty() && h.section.front() == ' ') h.section.erase(0, 1);
    h.header = line;
    h.preamble = std::move(pending);
    pending.clear();
    ++i;
    std::uint64_t old_left = h.old_range.count, new_left = h.new_range.count;
    while (i < lines.size() && (old_left > 0 || new_left > 0 || starts_with(lines[i], "\\"))) {
      const std::string& body = lines[i];
      char tag = body.empty() ? ' ' : body.front();
      if (tag == ' ') {
        if (old_left == 0 || new_left == 0) break;
        --old_left;
        --new_left;
      } else if (tag == '-') {
        if (old_left == 0) break;
        --old_left;
        h.removed_lines.push_back(body.substr(1));
      } else if (tag == '+') {
        if (new_left == 0) break;
        --new_left;
        h.added_lines.push_back(body.substr(1));
      } else if (tag != '\\') {
        break;
      }
      h.body.push_back(body);
      ++i;
    }
    if (old_left != 0 || new_left != 0) {
      fail(ErrorKind::MalformedDiff, "hunk '" + h.header + "' is short by " + std::to_string(old_left) + " old / " +
                                         std::to_string(new_left) + " new lines");
    }
    hunks.push_back(std::move(h));
  }
  if (!hunks.empty()) {
    // Header lines after the final hunk (e.g. a trailing binary file) ride along
    // in its body so nothing is lost.
    for (auto& p : pending) hunks.back().body.push_back(std::move(p));
    hunks.back().ends_with_newline = trailing_newline;
  }
  return hunks;
}

std::string serialize_hunks(const std::vector<Hunk>& hunks) {
  std::string out;
  for (std::size_t k = 0; k < hunks.size(); ++k) {
    const Hunk& h = hunks[k];
    auto emit = [&](const std::string& line) {
      out += line;
      out += '\n';
    };
    for (const auto& l : h.preamble) emit(l);
    emit(h.header);
    for (const auto& l : h.body) emit(l);
  }
  if (!hunks.empty() && !hunks.back().ends_with_newline) out.pop_back();
  return out;
}

std::string commit_diff_text(const github::Commit& commit, bool supported_only) {
  std::string out;
  for (const auto& f : commit.files) {
    if (supported_only && f.language == Language::Unsupported) continue;
    if (f.patch.empty()) continue;
    out += "diff --git a/" + f.path + " b/" + f.path + "\n--- a/" + f.path + "\n+++ b/" + f.path + "\n";
    out += f.patch;
    if (out.back() != '\n') out += '\n';
  }
  return out;
}

std::vector<CodeUnit> HunkSplitter::split(const github::Commit& commit) const {
  std::vector<CodeUnit> units;
  for (const auto& f : commit.files) {
    if (f.language == Language::Unsupported || f.patch.empty()) continue;
    std::vector<Hunk> hunks;
    try {
      hunks = parse_unified_diff(f.patch);
    } catch (const Error&) {
      // A patch the API truncated mid-hunk is still usable as raw text.
      units.push_back(CodeUnit{f.path, f.language, f.patch});
      continue;
    }
    for (auto& h : hunks) {
      std::string text = h.header + "\n";
      for (const auto& l : h.body) text += l + "\n";
      units.push_back(CodeUnit{f.path, f.language, std::move(text)});
    }
  }
  return units;
}

}  // namespace pcve::dataset
