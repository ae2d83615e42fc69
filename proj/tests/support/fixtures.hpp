#pragma once

#include <string>
#include <vector>

#include "pcve/common/io.hpp"

namespace pcve::testing {

// Entries of a fixture file separated by lines holding only "%%".
inline std::vector<std::string> read_delimited(const std::string& path) {
  std::vector<std::string> out;
  std::string current;
  std::string text = read_file(path);
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (line == "%%") {
      out.push_back(current);
      current.clear();
    } else {
      current += line + "\n";
    }
    start = end + 1;
  }
  if (current.find_first_not_of("\n") != std::string::npos) out.push_back(current);
  return out;
}

}  // namespace pcve::testing
