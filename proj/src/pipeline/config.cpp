#include "pcve/pipeline/config.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "pcve/common/error.hpp"
#include "pcve/detector/features.hpp"

namespace pcve::pipeline {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) { fail(ErrorKind::ConfigInvalid, key + ": " + what); }

std::string as_string(const std::string& key, const TomlValue& v) {
  if (auto s = std::get_if<std::string>(&v.value)) return *s;
  bad(key, "expected a string, got " + v.describe());
}

std::int64_t as_int(const std::string& key, const TomlValue& v) {
  if (auto i = std::get_if<std::int64_t>(&v.value)) return *i;
  bad(key, "expected an integer, got " + v.describe());
}

double as_double(const std::string& key, const TomlValue& v) {
  if (auto d = std::get_if<double>(&v.value)) return *d;
  if (auto i = std::get_if<std::int64_t>(&v.value)) return static_cast<double>(*i);
  bad(key, "expected a number, got " + v.describe());
}

bool as_bool(const std::string& key, const TomlValue& v) {
  if (auto b = std::get_if<bool>(&v.value)) return *b;
  bad(key, "expected true or false, got " + v.describe());
}

std::uint64_t as_uint(const std::string& key, const TomlValue& v) {
  auto i = as_int(key, v);
  if (i < 0) bad(key, "must not be negative");
  return static_cast<std::uint64_t>(i);
}

const TomlValue::Array& as_array(const std::string& key, const TomlValue& v) {
  if (auto a = std::get_if<TomlValue::Array>(&v.value)) return *a;
  bad(key, "expected an array, got " + v.describe());
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

Json path_json(const std::optional<std::filesystem::path>& p) { return p ? Json(p->string()) : Json(nullptr); }

}  // namespace

PipelineConfig config_from_table(const TomlTable& table, const std::filesystem::path& base) {
  PipelineConfig c;
  using Setter = std::function<void(const std::string&, const TomlValue&)>;
  auto path_opt = [&](std::optional<std::filesystem::path>& slot) {
    return [&slot, &base](const std::string& k, const TomlValue& v) {
      auto s = as_string(k, v);
      slot = s.empty() ? std::nullopt : std::optional(resolve(base, s));
    };
  };
  const std::map<std::string, Setter> setters{
      {"paths.feeds",
       [&](const std::string& k, const TomlValue& v) {
         c.feeds.clear();
         if (v.is_string()) c.feeds.push_back(resolve(base, as_string(k, v)));
         else
           for (const auto& item : as_array(k, v)) c.feeds.push_back(resolve(base, as_string(k, item)));
       }},
      {"paths.work_dir", [&](const std::string& k, const TomlValue& v) { c.work_dir = resolve(base, as_string(k, v)); }},
      {"paths.cache_dir", [&](const std::string& k, const TomlValue& v) { c.cache_dir = resolve(base, as_string(k, v)); }},
      {"paths.fixtures_dir", [&](const std::string& k, const TomlValue& v) { c.fixtures_dir = resolve(base, as_string(k, v)); }},
      {"paths.prompt_dir", path_opt(c.prompt_dir)},
      {"paths.cwe_anchors", path_opt(c.cwe_anchors)},
      {"paths.llm_mock", path_opt(c.llm_mock)},
      {"paths.annotations", path_opt(c.annotations)},
      {"paths.baseline_predictions",
       [&](const std::string& k, const TomlValue& v) {
         c.baseline_predictions.clear();
         for (const auto& item : as_array(k, v)) c.baseline_predictions.push_back(resolve(base, as_string(k, item)));
       }},
      {"run.seed", [&](const std::string& k, const TomlValue& v) { c.seed = as_uint(k, v); }},
      {"run.offline", [&](const std::string& k, const TomlValue& v) { c.offline = as_bool(k, v); }},
      {"run.parallelism", [&](const std::string& k, const TomlValue& v) { c.parallelism = as_uint(k, v); }},
      {"github.api_base", [&](const std::string& k, const TomlValue& v) { c.api_base = as_string(k, v); }},
      {"github.token", [&](const std::string& k, const TomlValue& v) { c.github_token = as_string(k, v); }},
      {"github.max_retries", [&](const std::string& k, const TomlValue& v) { c.max_retries = static_cast<int>(as_int(k, v)); }},
      {"thresholds.pcve_days", [&](const std::string& k, const TomlValue& v) { c.pcve_days = as_int(k, v); }},
      {"thresholds.half_window_days", [&](const std::string& k, const TomlValue& v) { c.half_window_days = as_int(k, v); }},
      {"thresholds.k", [&](const std::string& k, const TomlValue& v) { c.k = as_uint(k, v); }},
      {"sampling.buckets", [&](const std::string& k, const TomlValue& v) { c.buckets = static_cast<int>(as_int(k, v)); }},
      {"sampling.bucket_width_days", [&](const std::string& k, const TomlValue& v) { c.bucket_width_days = as_int(k, v); }},
      {"sampling.confidence", [&](const std::string& k, const TomlValue& v) { c.confidence = as_double(k, v); }},
      {"sampling.margin", [&](const std::string& k, const TomlValue& v) { c.margin = as_double(k, v); }},
      {"exclusions.year_min", [&](const std::string& k, const TomlValue& v) { c.exclusion_year_min = static_cast<int>(as_int(k, v)); }},
      {"exclusions.year_max", [&](const std::string& k, const TomlValue& v) { c.exclusion_year_max = static_cast<int>(as_int(k, v)); }},
      {"split.ratios",
       [&](const std::string& k, const TomlValue& v) {
         c.ratios.clear();
         for (const auto& item : as_array(k, v)) c.ratios.push_back(as_double(k, item));
       }},
      {"split.boundary_year", [&](const std::string& k, const TomlValue& v) { c.boundary_year = static_cast<int>(as_int(k, v)); }},
      {"detector.text_dim", [&](const std::string& k, const TomlValue& v) { c.text_dim = as_uint(k, v); }},
      {"detector.code_dim", [&](const std::string& k, const TomlValue& v) { c.code_dim = as_uint(k, v); }},
      {"detector.k_anchors", [&](const std::string& k, const TomlValue& v) { c.k_anchors = as_uint(k, v); }},
      {"detector.threshold", [&](const std::string& k, const TomlValue& v) { c.threshold = as_double(k, v); }},
      {"detector.learning_rate", [&](const std::string& k, const TomlValue& v) { c.learning_rate = as_double(k, v); }},
      {"detector.epochs", [&](const std::string& k, const TomlValue& v) { c.epochs = static_cast<int>(as_int(k, v)); }},
      {"detector.l2", [&](const std::string& k, const TomlValue& v) { c.l2 = as_double(k, v); }},
      {"detector.feature_config", [&](const std::string& k, const TomlValue& v) { c.feature_config = as_string(k, v); }},
      {"detector.encoder", [&](const std::string& k, const TomlValue& v) { c.encoder = as_string(k, v); }},
      {"detector.llm_baseline", [&](const std::string& k, const TomlValue& v) { c.llm_baseline = as_bool(k, v); }},
      {"summarizer.max_retries", [&](const std::string& k, const TomlValue& v) { c.summarizer_max_retries = static_cast<int>(as_int(k, v)); }},
      {"summarizer.budget_tokens", [&](const std::string& k, const TomlValue& v) { c.budget_tokens = as_uint(k, v); }},
      {"summarizer.max_output_tokens", [&](const std::string& k, const TomlValue& v) { c.max_output_tokens = as_uint(k, v); }},
      {"endpoints.encoder_url", [&](const std::string& k, const TomlValue& v) { c.encoder_url = as_string(k, v); }},
      {"endpoints.llm_url", [&](const std::string& k, const TomlValue& v) { c.llm_url = as_string(k, v); }},
      {"totals.total_pcves", [&](const std::string& k, const TomlValue& v) { c.total_pcves = as_uint(k, v); }},
  };
  for (const auto& [key, value] : table) {
    auto it = setters.find(key);
    if (it == setters.end()) fail(ErrorKind::ConfigInvalid, "unknown config key " + key);
    it->second(key, value);
  }
  return c;
}

void validate(const PipelineConfig& c) {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorKind::ConfigInvalid, msg);
  };
  check(c.parallelism >= 1 && c.parallelism <= 256, "run.parallelism must be in [1, 256]");
  check(c.max_retries >= 0 && c.max_retries <= 20, "github.max_retries must be in [0, 20]");
  check(c.pcve_days >= 0, "thresholds.pcve_days must be non-negative");
  check(c.half_window_days >= 1, "thresholds.half_window_days must be positive");
  check(c.k >= 1, "thresholds.k must be at least 1");
  check(c.buckets >= 1 && c.buckets <= 1000, "sampling.buckets must be in [1, 1000]");
  check(c.bucket_width_days >= 1, "sampling.bucket_width_days must be positive");
  check(std::abs(c.confidence - 0.90) < 1e-9 || std::abs(c.confidence - 0.95) < 1e-9 || std::abs(c.confidence - 0.99) < 1e-9,
        "sampling.confidence must be 0.90, 0.95 or 0.99");
  check(c.margin > 0 && c.margin < 1, "sampling.margin must lie in (0, 1)");
  check(c.exclusion_year_min <= c.exclusion_year_max, "exclusions.year_min exceeds year_max");
  check(c.ratios.size() == 3, "split.ratios needs three entries");
  if (c.ratios.size() == 3) {
    double sum = c.ratios[0] + c.ratios[1] + c.ratios[2];
    check(c.ratios[0] >= 0 && c.ratios[1] >= 0 && c.ratios[2] >= 0 && std::abs(sum - 1.0) < 1e-6, "split.ratios must be non-negative and sum to 1");
  }
  check(c.text_dim >= 1 && c.code_dim >= 1, "detector dimensions must be positive");
  check(c.threshold > 0 && c.threshold < 1, "detector.threshold must lie in (0, 1)");
  check(c.learning_rate > 0, "detector.learning_rate must be positive");
  check(c.epochs >= 1, "detector.epochs must be positive");
  check(c.l2 >= 0, "detector.l2 must be non-negative");
  {
    bool known = false;
    for (const auto& a : detector::table6_configs()) known = known || a.name == c.feature_config;
    check(known, "detector.feature_config names no known configuration: " + c.feature_config);
  }
  check(c.encoder == "hashing" || c.encoder == "remote", "detector.encoder must be \"hashing\" or \"remote\"");
  check(c.summarizer_max_retries >= 0, "summarizer.max_retries must be non-negative");
  check(c.budget_tokens >= 1, "summarizer.budget_tokens must be positive");
  check(c.max_output_tokens >= 1, "summarizer.max_output_tokens must be positive");
}

PipelineConfig load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides,
                           const EnvLookup& env) {
  TomlTable table;
  std::filesystem::path base;
  if (path) {
    if (!std::filesystem::exists(*path)) fail(ErrorKind::ConfigInvalid, "config file not found: " + path->string());
    table = parse_toml(read_file(*path), env);
    base = path->parent_path();
  }
  for (const auto& o : overrides) {
    auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) fail(ErrorKind::ConfigInvalid, "override must look like section.key=value: " + o);
    std::string key = o.substr(0, eq), raw = o.substr(eq + 1);
    TomlValue v;
    try {
      v = parse_toml_value(raw, env);
    } catch (const Error&) {
      v = TomlValue{interpolate(raw, env)};  // bare words are strings
    }
    table[key] = std::move(v);
  }
  auto config = config_from_table(table, base);
  validate(config);
  return config;
}

Json PipelineConfig::to_json() const {
  Json feeds_json = Json::array();
  for (const auto& f : feeds) feeds_json.push_back(f.string());
  Json baselines = Json::array();
  for (const auto& b : baseline_predictions) baselines.push_back(b.string());
  return Json{
      {"paths",
       {{"feeds", feeds_json},
        {"work_dir", work_dir.string()},
        {"cache_dir", cache_dir.string()},
        {"fixtures_dir", fixtures_dir.string()},
        {"prompt_dir", path_json(prompt_dir)},
        {"cwe_anchors", path_json(cwe_anchors)},
        {"llm_mock", path_json(llm_mock)},
        {"annotations", path_json(annotations)},
        {"baseline_predictions", baselines}}},
      {"run", {{"seed", seed}, {"offline", offline}, {"parallelism", parallelism}}},
      {"github", {{"api_base", api_base}, {"max_retries", max_retries}}},
      {"thresholds", {{"pcve_days", pcve_days}, {"half_window_days", half_window_days}, {"k", k}}},
      {"sampling", {{"buckets", buckets}, {"bucket_width_days", bucket_width_days}, {"confidence", confidence}, {"margin", margin}}},
      {"exclusions", {{"year_min", exclusion_year_min}, {"year_max", exclusion_year_max}}},
      {"split", {{"ratios", ratios}, {"boundary_year", boundary_year}}},
      {"detector",
       {{"text_dim", text_dim},
        {"code_dim", code_dim},
        {"k_anchors", k_anchors},
        {"threshold", threshold},
        {"learning_rate", learning_rate},
        {"epochs", epochs},
        {"l2", l2},
        {"feature_config", feature_config},
        {"encoder", encoder},
        {"llm_baseline", llm_baseline}}},
      {"summarizer", {{"max_retries", summarizer_max_retries}, {"budget_tokens", budget_tokens}, {"max_output_tokens", max_output_tokens}}},
      {"endpoints", {{"encoder_url", encoder_url}, {"llm_url", llm_url}}},
      {"totals", {{"total_pcves", total_pcves}}},
  };
}

}  // namespace pcve::pipeline
