#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pcve/common/io.hpp"
#include "pcve/pipeline/toml.hpp"

namespace pcve::pipeline {

struct PipelineConfig {
  // [paths]
  std::vector<std::filesystem::path> feeds;
  std::filesystem::path work_dir = "work";
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path fixtures_dir;  // GitHub API fixtures used when offline
  std::optional<std::filesystem::path> prompt_dir;
  std::optional<std::filesystem::path> cwe_anchors;
  std::optional<std::filesystem::path> llm_mock;  // canned responses {sha256: text}
  std::optional<std::filesystem::path> annotations;
  std::vector<std::filesystem::path> baseline_predictions;

  // [run]
  std::uint64_t seed = 0;
  bool offline = false;
  std::size_t parallelism = 8;

  // [github]
  std::string api_base = "https://api.github.com";
  std::string github_token;
  int max_retries = 5;

  // [thresholds]
  std::int64_t pcve_days = 365;
  std::int64_t half_window_days = 183;
  std::size_t k = 5;

  // [sampling]
  int buckets = 9;
  std::int64_t bucket_width_days = 90;
  double confidence = 0.95;
  double margin = 0.10;

  // [exclusions]
  int exclusion_year_min = 1999;
  int exclusion_year_max = 2024;

  // [split]
  std::vector<double> ratios{0.8, 0.1, 0.1};
  int boundary_year = 2020;

  // [detector]
  std::size_t text_dim = 768;
  std::size_t code_dim = 768;
  std::size_t k_anchors = 16;
  double threshold = 0.5;
  double learning_rate = 0.5;
  int epochs = 400;
  double l2 = 1e-4;
  std::string feature_config = "All Features";
  std::string encoder = "hashing";  // or "remote"
  bool llm_baseline = false;

  // [summarizer]
  int summarizer_max_retries = 2;
  std::size_t budget_tokens = 512;
  std::size_t max_output_tokens = 256;

  // [endpoints]
  std::string encoder_url;
  std::string llm_url;

  // [totals]
  std::uint64_t total_pcves = 0;

  // Canonical dump of every knob except secrets; hashed into model files.
  Json to_json() const;
};

// Unknown keys and out-of-range values raise ConfigInvalid. Overrides are
// "section.key=value" strings applied after the file.
PipelineConfig load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides = {},
                           const EnvLookup& env = process_env());
PipelineConfig config_from_table(const TomlTable& table, const std::filesystem::path& base_dir = {});
void validate(const PipelineConfig& config);

}  // namespace pcve::pipeline
