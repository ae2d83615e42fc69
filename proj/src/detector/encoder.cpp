#include "pcve/detector/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "pcve/common/error.hpp"
#include "pcve/common/hash.hpp"
#include "pcve/common/io.hpp"
#include "pcve/summarizer/tokens.hpp"

namespace pcve::detector {

std::string_view to_string(EmbeddingSource source) { return source == EmbeddingSource::Text ? "text" : "code"; }

HashingEncoder::HashingEncoder(std::size_t dim, EmbeddingSource source, std::uint64_t seed) : dim_(dim), source_(source), seed_(seed) {
  if (dim_ == 0) fail(ErrorKind::ConfigInvalid, "encoder dimension must be positive");
}

std::string HashingEncoder::identity() const {
  return "hashing/" + std::string(to_string(source_)) + "/" + std::to_string(dim_) + "/" + std::to_string(seed_);
}

EmbeddingVector HashingEncoder::encode(std::string_view content) const {
  EmbeddingVector v{std::vector<double>(dim_, 0.0), source_};
  std::vector<std::string> tokens;
  for (auto span : summarizer::tokenize(content)) {
    std::string t(content.substr(span.begin, span.end - span.begin));
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    tokens.push_back(std::move(t));
  }
  auto add = [&](std::string_view gram, double weight) {
    std::uint64_t h = mix64(fnv1a64(gram) ^ seed_);
    double sign = (h >> 63) ? -1.0 : 1.0;
    v.values[h % dim_] += sign * weight;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    add(tokens[i], 1.0);
    if (i + 1 < tokens.size()) add(tokens[i] + " " + tokens[i + 1], 1.0);
  }
  double norm = 0;
  for (double x : v.values) norm += x * x;
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (double& x : v.values) x /= norm;
  }
  return v;
}

RemoteEncoder::RemoteEncoder(std::shared_ptr<http::Transport> transport, std::string endpoint, EmbeddingSource source,
                             std::size_t dim)
    : transport_(std::move(transport)), endpoint_(std::move(endpoint)), source_(source), dim_(dim) {
  if (!transport_ || endpoint_.empty()) fail(ErrorKind::ConfigInvalid, "remote encoder needs a transport and endpoint");
}

std::string RemoteEncoder::identity() const { return "remote/" + std::string(to_string(source_)) + "/" + std::to_string(dim_) + "/" + endpoint_; }

EmbeddingVector RemoteEncoder::encode(std::string_view content) const {
  http::Request req;
  req.method = "POST";
  req.url = endpoint_;
  req.headers["Content-Type"] = "application/json";
  req.body = Json{{"kind", std::string(to_string(source_))}, {"content", std::string(content)}}.dump();
  http::Response resp;
  try {
    resp = transport_->send(req);
  } catch (const Error& e) {
    fail(ErrorKind::EncoderUnavailable, std::string("encoder request failed: ") + e.what());
  }
  if (resp.status < 200 || resp.status >= 300) fail(ErrorKind::EncoderUnavailable, "encoder returned HTTP " + std::to_string(resp.status));
  EmbeddingVector v{{}, source_};
  try {
    auto doc = Json::parse(resp.body);
    v.values = doc.at("vector").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::EncoderUnavailable, std::string("encoder reply unreadable: ") + e.what());
  }
  if (v.values.size() != dim_) {
    fail(ErrorKind::DimensionMismatch, "encoder returned " + std::to_string(v.values.size()) + " values, expected " + std::to_string(dim_));
  }
  for (double x : v.values) {
    if (!std::isfinite(x)) fail(ErrorKind::EncoderUnavailable, "encoder returned a non-finite value");
  }
  return v;
}

EmbeddingVector encode_text(std::string_view summary, const Encoder& encoder) {
  if (summarizer::count_tokens(summary) > summarizer::kDefaultBudget) {
    fail(ErrorKind::BudgetExceeded, "text exceeds the encoder's " + std::to_string(summarizer::kDefaultBudget) + "-token window");
  }
  return encoder.encode(summary);
}

EmbeddingVector mean_pool(std::span<const EmbeddingVector> vectors) {
  if (vectors.empty()) fail(ErrorKind::EmptyInput, "nothing to pool");
  EmbeddingVector out{std::vector<double>(vectors.front().dim(), 0.0), vectors.front().source};
  for (const auto& v : vectors) {
    if (v.dim() != out.dim()) fail(ErrorKind::DimensionMismatch, "pooled vectors differ in dimension");
    for (std::size_t i = 0; i < v.dim(); ++i) out.values[i] += v.values[i];
  }
  for (double& x : out.values) x /= static_cast<double>(vectors.size());
  return out;
}

EmbeddingVector encode_code(std::span<const github::Commit> commits, const Encoder& encoder, const dataset::FunctionSplitter& splitter) {
  if (commits.empty()) fail(ErrorKind::MissingCommit, "code encoding needs at least one commit");
  std::vector<EmbeddingVector> per_commit;
  for (const auto& c : commits) {
    std::string joined;
    for (const auto& unit : splitter.split(c)) {
      joined += unit.text;
      if (!joined.empty() && joined.back() != '\n') joined += '\n';
    }
    per_commit.push_back(encoder.encode(joined));
  }
  return mean_pool(per_commit);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::DimensionMismatch, "cosine of vectors with different dimensions");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace pcve::detector
