#pragma once

#include <string_view>

namespace pcve {

enum class Language { C, Cpp, Java, Unsupported };

std::string_view to_string(Language language);
Language language_from_string(std::string_view text);

namespace dataset {

// Extension-based, case-insensitive: .c -> C, .cpp/.cxx -> Cpp, .java -> Java.
Language detect_language(std::string_view path);

}  // namespace dataset
}  // namespace pcve
