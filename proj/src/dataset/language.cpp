#include "pcve/dataset/language.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "pcve/common/error.hpp"

namespace pcve {

std::string_view to_string(Language language) {
  switch (language) {
    case Language::C: return "C";
    case Language::Cpp: return "Cpp";
    case Language::Java: return "Java";
    case Language::Unsupported: return "Unsupported";
  }
  return "Unsupported";
}

Language language_from_string(std::string_view text) {
  if (text == "C") return Language::C;
  if (text == "Cpp") return Language::Cpp;
  if (text == "Java") return Language::Java;
  if (text == "Unsupported") return Language::Unsupported;
  fail(ErrorKind::MalformedRecord, "unknown language '" + std::string(text) + "'");
}

namespace dataset {

Language detect_language(std::string_view path) {
  auto slash = path.find_last_of("/\\");
  std::string_view name = slash == std::string_view::npos ? path : path.substr(slash + 1);
  auto dot = name.rfind('.');
  if (dot == std::string_view::npos || dot == 0) return Language::Unsupported;
  std::string ext(name.substr(dot + 1));
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == "c") return Language::C;
  if (ext == "cpp" || ext == "cxx") return Language::Cpp;
  if (ext == "java") return Language::Java;
  return Language::Unsupported;
}

}  // namespace dataset
}  // namespace pcve
