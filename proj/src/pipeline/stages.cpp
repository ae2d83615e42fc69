#include "pcve/pipeline/stages.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "pcve/common/hash.hpp"
#include "pcve/common/io.hpp"
#include "pcve/common/parallel.hpp"
#include "pcve/dataset/builder.hpp"
#include "pcve/dataset/diff.hpp"
#include "pcve/dataset/sample.hpp"
#include "pcve/detector/classifier.hpp"
#include "pcve/detector/cwe.hpp"
#include "pcve/detector/features.hpp"
#include "pcve/detector/llm_classify.hpp"
#include "pcve/evaluator/ablation.hpp"
#include "pcve/evaluator/metrics.hpp"
#include "pcve/evaluator/report.hpp"
#include "pcve/github/collect.hpp"
#include "pcve/nvd/cve_record.hpp"
#include "pcve/summarizer/prompts.hpp"
#include "pcve/summarizer/summarize.hpp"
#include "pcve/timeline/timeline.hpp"

namespace pcve::pipeline {

namespace fs = std::filesystem;

namespace {

const std::vector<StageSpec>& specs() {
  static const std::vector<StageSpec> table{
      {Stage::Ingest, {"feeds"}, {}, {"cves.jsonl", "cves_github.jsonl", "ingest_report.json"}},
      {Stage::Collect, {"cves_github.jsonl"}, {}, {"artifacts.jsonl"}},
      {Stage::Timeline,
       {"cves_github.jsonl", "artifacts.jsonl"},
       {},
       {"timelines.jsonl", "pcves.jsonl", "delta_stats.csv", "lifecycle_counts.csv", "timeline_report.json"}},
      {Stage::Sample, {"pcves.jsonl"}, {"annotations"}, {"annotation_sample.jsonl", "sample_lifecycle_counts.csv", "delay_reason_counts.csv"}},
      {Stage::Build,
       {"cves.jsonl", "cves_github.jsonl", "artifacts.jsonl", "pcves.jsonl"},
       {},
       {"dataset.jsonl", "split.json", "build_report.json"}},
      {Stage::Summarize, {"dataset.jsonl"}, {}, {"summaries.jsonl"}},
      {Stage::Train, {"dataset.jsonl", "split.json", "summaries.jsonl"}, {}, {"model.json"}},
      {Stage::Detect, {"model.json", "dataset.jsonl", "split.json", "summaries.jsonl"}, {}, {"predictions.jsonl"}},
      {Stage::Evaluate,
       {"predictions.jsonl", "dataset.jsonl"},
       {"baseline_predictions"},
       {"report.csv", "report.json", "overlap.csv", "per_language.csv"}},
      {Stage::Ablate, {"dataset.jsonl", "split.json", "summaries.jsonl"}, {}, {"ablation.csv"}},
  };
  return table;
}

template <typename T>
std::vector<T> read_rows(const fs::path& path, T (*convert)(const Json&)) {
  std::vector<T> out;
  for (const auto& row : read_jsonl(path)) out.push_back(convert(row));
  return out;
}

template <typename T>
void write_rows(const fs::path& path, const std::vector<T>& items) {
  std::vector<Json> rows;
  rows.reserve(items.size());
  for (const auto& item : items) rows.push_back(to_json(item));
  write_jsonl_atomic(path, rows);
}

void write_json(const fs::path& path, const Json& doc) { write_file_atomic(path, doc.dump(2) + "\n"); }

fs::path in_work(const PipelineConfig& c, const std::string& name) { return c.work_dir / name; }

void require_inputs(Stage stage, const PipelineConfig& c) {
  for (const auto& name : stage_spec(stage).inputs) {
    if (name == "feeds") {
      if (c.feeds.empty()) fail(ErrorKind::ConfigInvalid, "paths.feeds is empty");
      for (const auto& f : c.feeds) {
        if (!fs::exists(f)) fail(ErrorKind::MissingUpstream, "feed not found: " + f.string());
      }
      continue;
    }
    auto path = in_work(c, name);
    if (!fs::exists(path)) {
      fail(ErrorKind::MissingUpstream, std::string(to_string(stage)) + " needs " + path.string() + "; run the stage that writes it first");
    }
  }
}

// ---- collaborators ----------------------------------------------------------

std::shared_ptr<github::ArtifactSource> make_source(const PipelineConfig& c) {
  std::shared_ptr<http::Transport> transport;
  github::ClientOptions options;
  options.api_base = c.api_base;
  options.retry.max_retries = c.max_retries;
  options.jitter_seed = derive_seed(c.seed, "github-jitter");
  if (c.offline) {
    if (c.fixtures_dir.empty()) fail(ErrorKind::ConfigInvalid, "offline runs need paths.fixtures_dir");
    transport = std::make_shared<http::FixtureTransport>(c.fixtures_dir);
    options.sleep = [](std::chrono::milliseconds) {};
  } else {
    transport = std::make_shared<http::CurlTransport>();
    options.token = c.github_token;
  }
  auto client = std::make_shared<github::GitHubClient>(transport, options);
  return std::make_shared<github::CachedArtifactSource>(client, c.cache_dir);
}

std::shared_ptr<summarizer::TextGenerator> make_llm(const PipelineConfig& c) {
  std::shared_ptr<summarizer::TextGenerator> base;
  if (c.offline || c.llm_url.empty()) {
    if (!c.offline && !c.llm_mock) fail(ErrorKind::ConfigInvalid, "endpoints.llm_url is required unless running offline");
    base = std::make_shared<summarizer::ExtractiveGenerator>();
  } else {
    summarizer::HttpGeneratorOptions options;
    options.endpoint = c.llm_url;
    if (const char* key = std::getenv("LLM_API_KEY")) options.api_key = key;
    base = std::make_shared<summarizer::HttpTextGenerator>(std::make_shared<http::CurlTransport>(), options);
  }
  if (c.llm_mock) return summarizer::MockTextGenerator::from_file(*c.llm_mock, base);
  return base;
}

void fill_services(Services& s, const PipelineConfig& c, Stage stage) {
  bool needs_source = stage == Stage::Collect || stage == Stage::Build;
  bool needs_llm = stage == Stage::Summarize || (stage == Stage::Detect && c.llm_baseline);
  bool needs_encoders = stage == Stage::Train || stage == Stage::Detect || stage == Stage::Ablate;
  if (needs_source && !s.source) s.source = make_source(c);
  if (needs_llm && !s.llm) s.llm = make_llm(c);
  if (needs_encoders) {
    bool remote = c.encoder == "remote" && !c.offline;
    if (remote && c.encoder_url.empty()) fail(ErrorKind::ConfigInvalid, "endpoints.encoder_url is required for the remote encoder");
    auto transport = remote ? std::make_shared<http::CurlTransport>() : nullptr;
    if (!s.text_encoder) {
      s.text_encoder = remote ? std::shared_ptr<detector::Encoder>(std::make_shared<detector::RemoteEncoder>(
                                    transport, c.encoder_url, detector::EmbeddingSource::Text, c.text_dim))
                              : std::make_shared<detector::HashingEncoder>(c.text_dim, detector::EmbeddingSource::Text,
                                                                           derive_seed(c.seed, "text-encoder"));
    }
    if (!s.code_encoder) {
      s.code_encoder = remote ? std::shared_ptr<detector::Encoder>(std::make_shared<detector::RemoteEncoder>(
                                    transport, c.encoder_url, detector::EmbeddingSource::Code, c.code_dim))
                              : std::make_shared<detector::HashingEncoder>(c.code_dim, detector::EmbeddingSource::Code,
                                                                           derive_seed(c.seed, "code-encoder"));
    }
  }
}

// ---- shared detector plumbing ----------------------------------------------

struct DetectorInputs {
  std::vector<dataset::DetectionSample> samples;
  dataset::SplitManifest split;
  std::vector<detector::SampleEmbeddings> embeddings;  // parallel to samples
  std::vector<int> labels;
  detector::CweAnchorStore anchors;
  dataset::HunkSplitter splitter;
  detector::FeatureDims dims;
};

std::unique_ptr<DetectorInputs> load_detector_inputs(const PipelineConfig& c, const Services& s) {
  auto in = std::make_unique<DetectorInputs>();
  in->samples = dataset::read_dataset(in_work(c, "dataset.jsonl"));
  in->split = dataset::split_manifest_from_json(parse_json(read_file(in_work(c, "split.json")), "split.json"));
  auto summaries = read_rows(in_work(c, "summaries.jsonl"), &summarizer::sample_summary_from_json);
  std::map<std::string, const summarizer::SampleSummary*> by_id;
  for (const auto& sum : summaries) by_id[sum.sample_id] = &sum;

  in->dims = {c.text_dim, c.code_dim, c.k_anchors};
  auto definitions = detector::load_cwe_definitions(c.cwe_anchors);
  in->anchors = detector::build_anchor_store(definitions, *s.text_encoder);
  if (c.k_anchors > in->anchors.anchors.size()) fail(ErrorKind::ConfigInvalid, "detector.k_anchors exceeds the anchor table");

  detector::FeatureContext ctx{*s.text_encoder, *s.code_encoder, in->anchors, in->splitter, in->dims};
  in->embeddings.resize(in->samples.size());
  parallel_for(in->samples.size(), c.parallelism, [&](std::size_t i) {
    auto it = by_id.find(in->samples[i].sample_id);
    if (it == by_id.end()) fail(ErrorKind::JoinFailure, "no summary for sample " + in->samples[i].sample_id);
    in->embeddings[i] = detector::embed_sample(in->samples[i], *it->second, ctx);
  });
  for (const auto& sample : in->samples) in->labels.push_back(sample.label == dataset::Label::Vuln ? 1 : 0);
  return in;
}

detector::TrainOptions train_options(const PipelineConfig& c) {
  detector::TrainOptions o;
  o.learning_rate = c.learning_rate;
  o.epochs = c.epochs;
  o.l2 = c.l2;
  o.seed = derive_seed(c.seed, "classifier");
  o.threshold = c.threshold;
  return o;
}

std::string detector_config_hash(const PipelineConfig& c, const Services& s, const detector::CweAnchorStore& anchors) {
  Json anchor_ids = Json::array();
  for (const auto& a : anchors.anchors) anchor_ids.push_back(a.cwe_id);
  Json doc{{"detector", c.to_json()["detector"]},
           {"summarizer", c.to_json()["summarizer"]},
           {"text_encoder", s.text_encoder->identity()},
           {"code_encoder", s.code_encoder->identity()},
           {"anchors", anchor_ids}};
  return sha256_hex(doc.dump());
}

// ---- stages -----------------------------------------------------------------

StageResult ingest(const PipelineConfig& c) {
  std::map<std::string, nvd::CveRecord> by_id;
  std::vector<std::string> rejected;
  std::size_t duplicates = 0;
  for (const auto& feed : c.feeds) {
    auto load = nvd::load_feed_lenient(feed);
    rejected.insert(rejected.end(), load.rejected.begin(), load.rejected.end());
    for (auto& r : load.records) {
      if (!by_id.emplace(r.cve_id, r).second) ++duplicates;  // first feed wins
    }
  }
  std::vector<nvd::CveRecord> all;
  for (auto& [id, r] : by_id) all.push_back(std::move(r));
  auto github = nvd::filter_github_referenced(all);
  write_rows(in_work(c, "cves.jsonl"), all);
  write_rows(in_work(c, "cves_github.jsonl"), github);
  write_json(in_work(c, "ingest_report.json"), Json{{"records", all.size()},
                                                    {"github_referenced", github.size()},
                                                    {"duplicates", duplicates},
                                                    {"rejected", rejected}});
  return {{in_work(c, "cves.jsonl"), in_work(c, "cves_github.jsonl"), in_work(c, "ingest_report.json")},
          std::to_string(all.size()) + " CVEs, " + std::to_string(github.size()) + " with GitHub artifact links, " +
              std::to_string(rejected.size()) + " rejected"};
}

StageResult collect(const PipelineConfig& c, Services& s) {
  auto cves = read_rows(in_work(c, "cves_github.jsonl"), &nvd::cve_record_from_json);
  github::CollectOptions options;
  options.parallelism = c.parallelism;
  auto collected = github::collect_all(cves, *s.source, options);
  std::size_t artifacts = 0;
  for (const auto& cc : collected) artifacts += cc.artifacts.size();
  write_rows(in_work(c, "artifacts.jsonl"), collected);
  return {{in_work(c, "artifacts.jsonl")}, std::to_string(artifacts) + " artifacts for " + std::to_string(collected.size()) + " CVEs"};
}

StageResult timeline_stage(const PipelineConfig& c) {
  auto cves = read_rows(in_work(c, "cves_github.jsonl"), &nvd::cve_record_from_json);
  auto collected = read_rows(in_work(c, "artifacts.jsonl"), &github::collected_from_json);
  std::map<std::string, const github::CollectedCve*> by_id;
  for (const auto& cc : collected) by_id[cc.cve_id] = &cc;

  std::vector<timeline::VulnTimeline> timelines, pcves;
  std::map<std::string, std::size_t> excluded;
  for (const auto& cve : cves) {
    auto it = by_id.find(cve.cve_id);
    std::span<const github::LinkedArtifact> artifacts;
    if (it != by_id.end()) artifacts = it->second->artifacts;
    try {
      timelines.push_back(timeline::resolve_timestamps(cve, artifacts));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoArtifacts && e.kind() != ErrorKind::NegativeDelta) throw;
      ++excluded[std::string(to_string(e.kind()))];
      continue;
    }
    if (timeline::is_pcve(timelines.back(), c.pcve_days)) pcves.push_back(timelines.back());
  }
  write_rows(in_work(c, "timelines.jsonl"), timelines);
  write_rows(in_work(c, "pcves.jsonl"), pcves);
  std::vector<std::int64_t> deltas;
  for (const auto& t : timelines) deltas.push_back(t.delta_t_days);
  write_file_atomic(in_work(c, "delta_stats.csv"), deltas.empty() ? "statistic,days\n" : timeline::delta_stats_csv(timeline::delta_stats(deltas)));
  write_file_atomic(in_work(c, "lifecycle_counts.csv"), timeline::lifecycle_counts_csv(pcves));
  Json excluded_json = Json::object();
  for (const auto& [k, v] : excluded) excluded_json[k] = v;
  write_json(in_work(c, "timeline_report.json"),
             Json{{"cves", cves.size()}, {"timelines", timelines.size()}, {"pcves", pcves.size()}, {"excluded", excluded_json}});
  std::vector<fs::path> written;
  for (const auto& name : stage_spec(Stage::Timeline).outputs) written.push_back(in_work(c, name));
  return {written, std::to_string(timelines.size()) + " timelines, " + std::to_string(pcves.size()) + " PCVEs"};
}

StageResult sample_stage(const PipelineConfig& c) {
  auto pcves = read_rows(in_work(c, "pcves.jsonl"), &timeline::timeline_from_json);
  std::vector<timeline::VulnTimeline> picked;
  if (!pcves.empty()) {
    auto n = timeline::cochran_sample_size(static_cast<std::int64_t>(pcves.size()), c.confidence, c.margin);
    timeline::StrataSpec spec{c.pcve_days, c.bucket_width_days, c.buckets};
    picked = timeline::stratified_sample(pcves, static_cast<std::size_t>(n), derive_seed(c.seed, "annotation-sample"), spec);
  }
  write_rows(in_work(c, "annotation_sample.jsonl"), picked);
  write_file_atomic(in_work(c, "sample_lifecycle_counts.csv"), timeline::lifecycle_counts_csv(picked));

  std::string reasons = "reason,count\n";
  if (c.annotations) {
    std::map<std::string, std::size_t> counts;
    for (const auto& a : timeline::read_annotations(c.annotations->string())) {
      for (auto r : a.reasons) ++counts[std::string(timeline::to_string(r))];
    }
    for (const auto& [r, n] : counts) reasons += csv_row({r, std::to_string(n)});
  }
  write_file_atomic(in_work(c, "delay_reason_counts.csv"), reasons);
  std::vector<fs::path> written;
  for (const auto& name : stage_spec(Stage::Sample).outputs) written.push_back(in_work(c, name));
  return {written, std::to_string(picked.size()) + " of " + std::to_string(pcves.size()) + " PCVEs selected for annotation"};
}

StageResult build_stage(const PipelineConfig& c, Services& s) {
  auto all = read_rows(in_work(c, "cves.jsonl"), &nvd::cve_record_from_json);
  auto cves = read_rows(in_work(c, "cves_github.jsonl"), &nvd::cve_record_from_json);
  auto collected = read_rows(in_work(c, "artifacts.jsonl"), &github::collected_from_json);
  auto pcves = read_rows(in_work(c, "pcves.jsonl"), &timeline::timeline_from_json);

  std::vector<nvd::CveRecord> in_range;
  for (const auto& r : all) {
    int year = r.disclosed_at.year();
    if (year >= c.exclusion_year_min && year <= c.exclusion_year_max) in_range.push_back(r);
  }
  auto exclusions = dataset::build_exclusions(in_range, collected);

  std::set<std::string> pcve_ids;
  for (const auto& t : pcves) pcve_ids.insert(t.cve_id);
  std::vector<nvd::CveRecord> targets;
  for (const auto& r : cves) {
    if (pcve_ids.contains(r.cve_id)) targets.push_back(r);
  }

  dataset::BuildOptions options;
  options.window = {c.k, c.half_window_days};
  options.seed = derive_seed(c.seed, "non-vulnerable");
  options.parallelism = c.parallelism;
  auto result = dataset::build_dataset(targets, collected, *s.source, exclusions, options);
  if (result.samples.empty()) fail(ErrorKind::EmptyInput, "no detection samples could be built");

  auto split = dataset::split_dataset(result.samples, {c.ratios[0], c.ratios[1], c.ratios[2]}, c.boundary_year,
                                      derive_seed(c.seed, "split"));
  write_rows(in_work(c, "dataset.jsonl"), result.samples);
  write_json(in_work(c, "split.json"), dataset::to_json(split));
  write_json(in_work(c, "build_report.json"), dataset::to_json(result.report));
  return {{in_work(c, "dataset.jsonl"), in_work(c, "split.json"), in_work(c, "build_report.json")},
          std::to_string(result.report.vuln_samples) + " vulnerable and " + std::to_string(result.report.non_vuln_samples) +
              " non-vulnerable samples; split " + std::to_string(split.train_ids.size()) + "/" + std::to_string(split.val_ids.size()) +
              "/" + std::to_string(split.test_ids.size())};
}

summarizer::SummarizerOptions summarizer_options(const PipelineConfig& c) {
  summarizer::SummarizerOptions o;
  o.max_retries = c.summarizer_max_retries;
  o.budget_tokens = c.budget_tokens;
  o.max_output_tokens = c.max_output_tokens;
  o.parallelism = c.parallelism;
  return o;
}

StageResult summarize_stage(const PipelineConfig& c, Services& s) {
  auto samples = dataset::read_dataset(in_work(c, "dataset.jsonl"));
  auto prompts = summarizer::load_prompts(c.prompt_dir);
  auto summaries = summarizer::summarize_all(samples, *s.llm, prompts, summarizer_options(c));
  write_rows(in_work(c, "summaries.jsonl"), summaries);
  return {{in_work(c, "summaries.jsonl")}, std::to_string(summaries.size()) + " samples summarized"};
}

StageResult train_stage(const PipelineConfig& c, Services& s) {
  auto in = load_detector_inputs(c, s);
  detector::FeatureContext ctx{*s.text_encoder, *s.code_encoder, in->anchors, in->splitter, in->dims};
  auto config = detector::ablation_config(c.feature_config);
  // The model only ever sees training samples; validation ids are reported
  // through the split manifest.
  std::vector<std::string> none;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < in->samples.size(); ++i) index[in->samples[i].sample_id] = i;
  std::vector<detector::FeatureVector> xs;
  std::vector<int> ys;
  for (const auto& id : in->split.train_ids) {
    auto it = index.find(id);
    if (it == index.end()) fail(ErrorKind::JoinFailure, "split names unknown sample " + id);
    xs.push_back(detector::assemble(in->embeddings[it->second], config, ctx));
    ys.push_back(in->labels[it->second]);
  }
  auto model = detector::train({xs, ys}, train_options(c));
  model.feature_config = config.name;
  model.config_hash = detector_config_hash(c, s, in->anchors);
  write_json(in_work(c, "model.json"), detector::to_json(model));
  return {{in_work(c, "model.json")}, "trained on " + std::to_string(xs.size()) + " samples, final loss " +
                                          format_fixed(model.training.loss_curve.back(), 4)};
}

StageResult detect_stage(const PipelineConfig& c, Services& s) {
  auto in = load_detector_inputs(c, s);
  auto model = detector::model_from_json(parse_json(read_file(in_work(c, "model.json")), "model.json"));
  if (model.config_hash != detector_config_hash(c, s, in->anchors)) {
    fail(ErrorKind::ConfigInvalid, "model.json was trained under a different detector configuration; rerun train");
  }
  detector::FeatureContext ctx{*s.text_encoder, *s.code_encoder, in->anchors, in->splitter, in->dims};
  auto config = detector::ablation_config(model.feature_config);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < in->samples.size(); ++i) index[in->samples[i].sample_id] = i;

  std::vector<evaluator::PredictionRecord> rows;
  auto prompts = summarizer::load_prompts(c.prompt_dir);
  for (const auto& id : in->split.test_ids) {
    auto it = index.find(id);
    if (it == index.end()) fail(ErrorKind::JoinFailure, "split names unknown sample " + id);
    const auto& sample = in->samples[it->second];
    auto p = detector::predict(model, detector::assemble(in->embeddings[it->second], config, ctx), id);
    rows.push_back({"DeeptraVul", id, sample.cve_id, sample.label, p.score, p.label, std::nullopt});
  }
  if (c.llm_baseline) {
    std::vector<evaluator::PredictionRecord> llm_rows(in->split.test_ids.size());
    parallel_for(in->split.test_ids.size(), c.parallelism, [&](std::size_t k) {
      const auto& sample = in->samples[index.at(in->split.test_ids[k])];
      auto p = detector::llm_classify(detector::classify_bundle(sample), *s.llm, prompts, sample.sample_id);
      llm_rows[k] = {"LLM zero-shot", sample.sample_id, sample.cve_id, sample.label, p.score, p.label, p.justification};
    });
    rows.insert(rows.end(), llm_rows.begin(), llm_rows.end());
  }
  write_rows(in_work(c, "predictions.jsonl"), rows);
  return {{in_work(c, "predictions.jsonl")}, std::to_string(rows.size()) + " predictions"};
}

StageResult evaluate_stage(const PipelineConfig& c) {
  if (c.total_pcves == 0) fail(ErrorKind::ConfigInvalid, "totals.total_pcves must be set for evaluation");
  auto predictions = evaluator::read_predictions(in_work(c, "predictions.jsonl").string());
  for (const auto& extra : c.baseline_predictions) {
    if (!fs::exists(extra)) fail(ErrorKind::MissingUpstream, "baseline predictions not found: " + extra.string());
    auto more = evaluator::read_predictions(extra.string());
    predictions.insert(predictions.end(), more.begin(), more.end());
  }
  auto samples = dataset::read_dataset(in_work(c, "dataset.jsonl"));

  std::map<std::string, std::vector<evaluator::PredictionRecord>> by_detector;
  for (auto& p : predictions) by_detector[p.detector].push_back(p);

  std::vector<evaluator::DetectorReport> reports;
  std::map<std::string, std::set<std::string>> detected;
  std::map<std::string, std::map<Language, double>> languages;
  for (const auto& [name, rows] : by_detector) {
    reports.push_back({name, evaluator::evaluate_detector(rows, c.total_pcves)});
    auto& set = detected[name];
    for (const auto& r : rows) {
      if (r.truth == dataset::Label::Vuln && r.predicted == dataset::Label::Vuln) set.insert(*r.cve_id);
    }
    languages[name] = evaluator::per_language_effectiveness(rows, samples);
  }
  if (reports.empty()) fail(ErrorKind::EmptyInput, "predictions file is empty");
  auto overlap = evaluator::overlap_matrix(detected);
  Json report = evaluator::report_json(reports);
  report["overlap"] = evaluator::to_json(overlap);
  write_file_atomic(in_work(c, "report.csv"), evaluator::report_csv(reports));
  write_json(in_work(c, "report.json"), report);
  write_file_atomic(in_work(c, "overlap.csv"), evaluator::overlap_csv(overlap));
  write_file_atomic(in_work(c, "per_language.csv"), evaluator::per_language_csv(languages));
  std::vector<fs::path> written;
  for (const auto& name : stage_spec(Stage::Evaluate).outputs) written.push_back(in_work(c, name));
  return {written, std::to_string(reports.size()) + " detectors evaluated"};
}

StageResult ablate_stage(const PipelineConfig& c, Services& s) {
  auto in = load_detector_inputs(c, s);
  detector::FeatureContext ctx{*s.text_encoder, *s.code_encoder, in->anchors, in->splitter, in->dims};
  auto results = evaluator::ablation_sweep({in->embeddings, in->labels}, in->split, detector::table6_configs(), ctx, train_options(c));
  write_file_atomic(in_work(c, "ablation.csv"), evaluator::ablation_csv(results));
  return {{in_work(c, "ablation.csv")}, std::to_string(results.size()) + " configurations evaluated"};
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Ingest: return "ingest";
    case Stage::Collect: return "collect";
    case Stage::Timeline: return "timeline";
    case Stage::Sample: return "sample";
    case Stage::Build: return "build";
    case Stage::Summarize: return "summarize";
    case Stage::Train: return "train";
    case Stage::Detect: return "detect";
    case Stage::Evaluate: return "evaluate";
    case Stage::Ablate: return "ablate";
  }
  return "?";
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages{Stage::Ingest, Stage::Collect,   Stage::Timeline, Stage::Sample,   Stage::Build,
                                         Stage::Summarize, Stage::Train, Stage::Detect,   Stage::Evaluate, Stage::Ablate};
  return stages;
}

Stage stage_from_string(std::string_view text) {
  for (auto s : all_stages()) {
    if (to_string(s) == text) return s;
  }
  fail(ErrorKind::InvalidArgument, "unknown stage: " + std::string(text));
}

const StageSpec& stage_spec(Stage stage) {
  for (const auto& s : specs()) {
    if (s.stage == stage) return s;
  }
  fail(ErrorKind::InvalidArgument, "no spec for stage");
}

std::string plan(const PipelineConfig& config) {
  std::set<std::string> available{"feeds"};
  std::set<std::string> written;
  std::ostringstream out;
  out << "work_dir: " << config.work_dir.string() << "\n";
  for (auto stage : all_stages()) {
    const auto& spec = stage_spec(stage);
    for (const auto& in : spec.inputs) {
      if (!available.contains(in)) fail(ErrorKind::ConfigInvalid, std::string(to_string(stage)) + " reads " + in + " before any stage writes it");
    }
    out << to_string(stage) << "\n  reads:";
    for (const auto& in : spec.inputs) out << " " << in;
    for (const auto& in : spec.optional_inputs) out << " [" << in << "]";
    out << "\n  writes:";
    for (const auto& o : spec.outputs) {
      if (!written.insert(o).second) fail(ErrorKind::ConfigInvalid, o + " is written by more than one stage");
      available.insert(o);
      out << " " << o;
    }
    out << "\n";
  }
  return out.str();
}

StageResult run_stage(Stage stage, const PipelineConfig& config, Services services) {
  validate(config);
  require_inputs(stage, config);
  fs::create_directories(config.work_dir);
  fill_services(services, config, stage);
  switch (stage) {
    case Stage::Ingest: return ingest(config);
    case Stage::Collect: return collect(config, services);
    case Stage::Timeline: return timeline_stage(config);
    case Stage::Sample: return sample_stage(config);
    case Stage::Build: return build_stage(config, services);
    case Stage::Summarize: return summarize_stage(config, services);
    case Stage::Train: return train_stage(config, services);
    case Stage::Detect: return detect_stage(config, services);
    case Stage::Evaluate: return evaluate_stage(config);
    case Stage::Ablate: return ablate_stage(config, services);
  }
  fail(ErrorKind::InvalidArgument, "unknown stage");
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigInvalid: return 2;
    case ErrorKind::MissingUpstream: return 3;
    case ErrorKind::RateLimited:
    case ErrorKind::AuthFailure:
    case ErrorKind::NetworkFailure:
    case ErrorKind::LlmUnavailable:
    case ErrorKind::EncoderUnavailable: return 4;
    default: return 1;
  }
}

}  // namespace pcve::pipeline
