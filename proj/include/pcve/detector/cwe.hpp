#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcve/detector/encoder.hpp"

namespace pcve::detector {

struct CweDefinition {
  std::string cwe_id;
  std::string description;
};

struct CweAnchor {
  std::string cwe_id;
  std::string description;
  EmbeddingVector embedding;
};

struct CweAnchorStore {
  std::vector<CweAnchor> anchors;  // unique ids, equal dimensions
};

// The bundled anchor table, or a JSON file of [{"cwe_id", "description"}].
std::vector<CweDefinition> load_cwe_definitions(const std::optional<std::filesystem::path>& path = std::nullopt);
CweAnchorStore build_anchor_store(std::span<const CweDefinition> definitions, const Encoder& text_encoder);

// The k largest cosine similarities to the anchors, descending.
std::vector<double> cwe_features(const EmbeddingVector& text_vec, const CweAnchorStore& store, std::size_t k);

}  // namespace pcve::detector
