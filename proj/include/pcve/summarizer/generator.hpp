#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "pcve/common/http.hpp"

namespace pcve::summarizer {

class TextGenerator {
public:
  virtual ~TextGenerator() = default;
  // Throws LlmUnavailable when no completion can be obtained.
  virtual std::string generate(const std::string& prompt, std::size_t max_tokens) = 0;
};

struct HttpGeneratorOptions {
  std::string endpoint;
  std::string api_key;  // sent as a bearer token when non-empty
  double temperature = 0.0;
  int max_attempts = 3;
};

// POSTs {"prompt", "max_tokens", "temperature"} and accepts {"text"} or an
// OpenAI-style "choices" array in reply.
class HttpTextGenerator final : public TextGenerator {
public:
  HttpTextGenerator(std::shared_ptr<http::Transport> transport, HttpGeneratorOptions options);
  std::string generate(const std::string& prompt, std::size_t max_tokens) override;

  static std::string extract_text(std::string_view response_body);

private:
  std::shared_ptr<http::Transport> transport_;
  HttpGeneratorOptions options_;
};

// Deterministic offline stand-in. Summarization prompts get an extractive
// summary of their input section with code-looking lines removed;
// classification prompts get a keyword verdict in the expected format.
class ExtractiveGenerator final : public TextGenerator {
public:
  std::string generate(const std::string& prompt, std::size_t max_tokens) override;
};

// Canned responses keyed by the SHA-256 of the prompt. Unknown prompts go to
// the fallback, or fail with LlmUnavailable when there is none.
class MockTextGenerator final : public TextGenerator {
public:
  explicit MockTextGenerator(std::map<std::string, std::string> canned, std::shared_ptr<TextGenerator> fallback = nullptr);

  // Reads a JSON object {sha256: response}.
  static std::unique_ptr<MockTextGenerator> from_file(const std::filesystem::path& path,
                                                      std::shared_ptr<TextGenerator> fallback = nullptr);

  std::string generate(const std::string& prompt, std::size_t max_tokens) override;
  std::size_t calls() const;
  std::vector<std::string> prompts() const;

private:
  std::map<std::string, std::string> canned_;
  std::shared_ptr<TextGenerator> fallback_;
  mutable std::mutex mutex_;
  std::vector<std::string> prompts_;
};

}  // namespace pcve::summarizer
