#include "pcve/summarizer/generator.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "pcve/common/error.hpp"
#include "pcve/common/hash.hpp"
#include "pcve/common/io.hpp"
#include "pcve/summarizer/code_detect.hpp"
#include "pcve/summarizer/tokens.hpp"

namespace pcve::summarizer {

HttpTextGenerator::HttpTextGenerator(std::shared_ptr<http::Transport> transport, HttpGeneratorOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {
  if (!transport_) fail(ErrorKind::InvalidArgument, "generator needs a transport");
  if (options_.endpoint.empty()) fail(ErrorKind::ConfigInvalid, "LLM endpoint is not configured");
}

std::string HttpTextGenerator::extract_text(std::string_view body) {
  Json doc;
  try {
    doc = Json::parse(body);
  } catch (const Json::parse_error&) {
    fail(ErrorKind::LlmUnavailable, "LLM replied with invalid JSON");
  }
  if (doc.contains("text") && doc["text"].is_string()) return doc["text"].get<std::string>();
  if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
    const auto& choice = doc["choices"][0];
    if (choice.contains("text") && choice["text"].is_string()) return choice["text"].get<std::string>();
    if (choice.contains("message") && choice["message"].contains("content") && choice["message"]["content"].is_string()) {
      return choice["message"]["content"].get<std::string>();
    }
  }
  fail(ErrorKind::LlmUnavailable, "LLM reply has no text field");
}

std::string HttpTextGenerator::generate(const std::string& prompt, std::size_t max_tokens) {
  http::Request req;
  req.method = "POST";
  req.url = options_.endpoint;
  req.headers["Content-Type"] = "application/json";
  if (!options_.api_key.empty()) req.headers["Authorization"] = "Bearer " + options_.api_key;
  req.body = Json{{"prompt", prompt}, {"max_tokens", max_tokens}, {"temperature", options_.temperature}}.dump();
  std::string last_error;
  for (int attempt = 0; attempt < std::max(1, options_.max_attempts); ++attempt) {
    try {
      auto resp = transport_->send(req);
      if (resp.status >= 200 && resp.status < 300) return extract_text(resp.body);
      last_error = "HTTP " + std::to_string(resp.status);
      if (resp.status != 429 && resp.status < 500) break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NetworkFailure) throw;
      last_error = e.what();
    }
  }
  fail(ErrorKind::LlmUnavailable, "text generation failed: " + last_error);
}

namespace {

constexpr std::array<std::string_view, 24> kSecurityTerms{
    "overflow",  "out-of-bounds", "out of bounds", "use-after-free", "use after free", "injection", "xss",
    "cross-site", "csrf",         "traversal",     "null pointer",   "dereference",    "vulnerab",  "exploit",
    "cve",       "security",      "denial of service", "double free", "memory corruption", "sanitiz",
    "unauthorized", "privilege",  "heap",          "crash"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string collapse_prose(std::string_view input) {
  std::string out;
  std::size_t pos = 0;
  bool in_fence = false;
  while (pos <= input.size()) {
    auto nl = input.find('\n', pos);
    std::string_view line = input.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    bool fence = line.find("```") != std::string_view::npos || line.find("~~~") != std::string_view::npos;
    if (fence) in_fence = !in_fence;
    if (!fence && !in_fence && !contains_source_code(line)) {
      for (char c : line) {
        // Code punctuation goes too, so joined lines can never read as code.
        if (std::isspace(static_cast<unsigned char>(c)) || std::string_view("{}()[];=<>#*&|+/\\`~:").find(c) != std::string_view::npos) {
          if (!out.empty() && out.back() != ' ') out += ' ';
        } else {
          out += c;
        }
      }
      if (!out.empty() && out.back() != ' ') out += ' ';
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace

std::string ExtractiveGenerator::generate(const std::string& prompt, std::size_t max_tokens) {
  if (prompt.find("Answer: Yes / No") != std::string::npos) {
    std::string text = lower(prompt.substr(prompt.find("=== PULL REQUEST DESCRIPTION ===") == std::string::npos
                                               ? 0
                                               : prompt.find("=== PULL REQUEST DESCRIPTION ===")));
    for (auto term : kSecurityTerms) {
      if (text.find(term) != std::string::npos) {
        return "Answer: Yes\nJustification: The artifacts mention " + std::string(term) + ".";
      }
    }
    return "Answer: No\nJustification: No security-relevant terms appear in the artifacts.";
  }
  auto marker = prompt.rfind("Input:\n");
  std::string_view input = marker == std::string::npos ? std::string_view(prompt) : std::string_view(prompt).substr(marker + 7);
  std::string summary = collapse_prose(input);
  // max_tokens is a limit on the reply; stand-in tokens stay within it.
  summary = truncate_to_budget(summary, std::max<std::size_t>(2, static_cast<std::size_t>(max_tokens / kSafetyFactor)));
  if (summary.empty()) summary = "No discussion content.";
  return summary;
}

MockTextGenerator::MockTextGenerator(std::map<std::string, std::string> canned, std::shared_ptr<TextGenerator> fallback)
    : canned_(std::move(canned)), fallback_(std::move(fallback)) {}

std::unique_ptr<MockTextGenerator> MockTextGenerator::from_file(const std::filesystem::path& path,
                                                                std::shared_ptr<TextGenerator> fallback) {
  auto doc = parse_json(read_file(path), path.string());
  if (!doc.is_object()) fail(ErrorKind::MalformedRecord, path.string() + ": expected an object of canned responses");
  std::map<std::string, std::string> canned;
  for (auto it = doc.begin(); it != doc.end(); ++it) canned[it.key()] = it.value().get<std::string>();
  return std::make_unique<MockTextGenerator>(std::move(canned), std::move(fallback));
}

std::string MockTextGenerator::generate(const std::string& prompt, std::size_t max_tokens) {
  {
    std::lock_guard lock(mutex_);
    prompts_.push_back(prompt);
  }
  auto it = canned_.find(sha256_hex(prompt));
  if (it != canned_.end()) return it->second;
  if (fallback_) return fallback_->generate(prompt, max_tokens);
  fail(ErrorKind::LlmUnavailable, "no canned response for prompt " + sha256_hex(prompt).substr(0, 12));
}

std::size_t MockTextGenerator::calls() const {
  std::lock_guard lock(mutex_);
  return prompts_.size();
}

std::vector<std::string> MockTextGenerator::prompts() const {
  std::lock_guard lock(mutex_);
  return prompts_;
}

}  // namespace pcve::summarizer
