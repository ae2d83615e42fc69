// Writes a synthetic offline corpus: pcve_synth <dir> [seed]
#include <cstdlib>
#include <iostream>

#include "corpus.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: pcve_synth <dir> [seed]\n";
    return 2;
  }
  pcve::testing::CorpusOptions options;
  if (argc > 2) options.seed = std::strtoull(argv[2], nullptr, 10);
  auto layout = pcve::testing::write_corpus(argv[1], options);
  std::cout << "config: " << layout.config.string() << "\n";
  return 0;
}
