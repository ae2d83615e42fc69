#include "pcve/detector/cwe.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "pcve/common/error.hpp"
#include "pcve/common/io.hpp"
#include "pcve/embedded_prompts.hpp"

namespace pcve::detector {

std::vector<CweDefinition> load_cwe_definitions(const std::optional<std::filesystem::path>& path) {
  std::string text = path ? read_file(*path) : std::string(embedded::cwe_anchors);
  auto doc = parse_json(text, path ? path->string() : "bundled CWE anchors");
  std::vector<CweDefinition> out;
  std::set<std::string> seen;
  try {
    for (const auto& row : doc) {
      CweDefinition d{row.at("cwe_id").get<std::string>(), row.at("description").get<std::string>()};
      if (!seen.insert(d.cwe_id).second) fail(ErrorKind::MalformedRecord, "duplicate anchor " + d.cwe_id);
      out.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedRecord, std::string("CWE anchor table: ") + e.what());
  }
  return out;
}

CweAnchorStore build_anchor_store(std::span<const CweDefinition> definitions, const Encoder& text_encoder) {
  CweAnchorStore store;
  std::set<std::string> seen;
  for (const auto& d : definitions) {
    if (!seen.insert(d.cwe_id).second) fail(ErrorKind::InvalidArgument, "duplicate anchor " + d.cwe_id);
    store.anchors.push_back({d.cwe_id, d.description, text_encoder.encode(d.description)});
  }
  return store;
}

std::vector<double> cwe_features(const EmbeddingVector& text_vec, const CweAnchorStore& store, std::size_t k) {
  if (store.anchors.empty()) fail(ErrorKind::InvalidArgument, "anchor store is empty");
  if (k > store.anchors.size()) fail(ErrorKind::InvalidArgument, "k exceeds the number of anchors");
  std::vector<double> sims;
  sims.reserve(store.anchors.size());
  for (const auto& a : store.anchors) {
    if (a.embedding.dim() != text_vec.dim()) fail(ErrorKind::DimensionMismatch, "anchor " + a.cwe_id + " dimension differs from text vector");
    sims.push_back(cosine(text_vec.values, a.embedding.values));
  }
  std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(k), sims.end(), std::greater<>());
  sims.resize(k);
  return sims;
}

}  // namespace pcve::detector
