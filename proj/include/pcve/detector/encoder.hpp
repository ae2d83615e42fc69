#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcve/common/http.hpp"
#include "pcve/dataset/diff.hpp"
#include "pcve/github/artifacts.hpp"

namespace pcve::detector {

enum class EmbeddingSource { Text, Code };

std::string_view to_string(EmbeddingSource source);

struct EmbeddingVector {
  std::vector<double> values;
  EmbeddingSource source = EmbeddingSource::Text;

  std::size_t dim() const { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

class Encoder {
public:
  virtual ~Encoder() = default;
  virtual std::size_t dim() const = 0;
  virtual EmbeddingSource source() const = 0;
  // Short identity string that changes whenever the mapping would.
  virtual std::string identity() const = 0;
  virtual EmbeddingVector encode(std::string_view content) const = 0;
};

// Signed feature hashing of lower-cased unigrams and bigrams, L2-normalized.
// Empty input maps to the zero vector.
class HashingEncoder final : public Encoder {
public:
  HashingEncoder(std::size_t dim, EmbeddingSource source, std::uint64_t seed = 0);
  std::size_t dim() const override { return dim_; }
  EmbeddingSource source() const override { return source_; }
  std::string identity() const override;
  EmbeddingVector encode(std::string_view content) const override;

private:
  std::size_t dim_;
  EmbeddingSource source_;
  std::uint64_t seed_;
};

// POSTs {"kind": "text"|"code", "content"} and expects {"vector": [...]}.
class RemoteEncoder final : public Encoder {
public:
  RemoteEncoder(std::shared_ptr<http::Transport> transport, std::string endpoint, EmbeddingSource source, std::size_t dim);
  std::size_t dim() const override { return dim_; }
  EmbeddingSource source() const override { return source_; }
  std::string identity() const override;
  EmbeddingVector encode(std::string_view content) const override;

private:
  std::shared_ptr<http::Transport> transport_;
  std::string endpoint_;
  EmbeddingSource source_;
  std::size_t dim_;
};

// Throws BudgetExceeded beyond the encoder's 512-token window.
EmbeddingVector encode_text(std::string_view summary, const Encoder& encoder);

// One embedding per commit (its code units joined), mean-pooled.
EmbeddingVector encode_code(std::span<const github::Commit> commits, const Encoder& encoder,
                            const dataset::FunctionSplitter& splitter);

EmbeddingVector mean_pool(std::span<const EmbeddingVector> vectors);
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace pcve::detector
