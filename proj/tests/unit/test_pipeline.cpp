#include <doctest.h>

#include <fstream>

#include "corpus.hpp"
#include "pcve/common/io.hpp"
#include "pcve/pipeline/config.hpp"
#include "pcve/pipeline/stages.hpp"
#include "pcve/pipeline/toml.hpp"

using namespace pcve;
using namespace pcve::pipeline;

namespace {

EnvLookup fake_env(std::map<std::string, std::string> vars) {
  return [vars](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("toml subset") {
  auto t = parse_toml(R"(
# comment
top = 1
[paths]
feeds = ["a.json", 'b.json']   # trailing comment
work_dir = "w # not a comment"
[detector.extra]
rate = 2.5e-1
on = true
neg = -3
)",
                      fake_env({}));
  CHECK(std::get<std::int64_t>(t.at("top").value) == 1);
  auto feeds = std::get<TomlValue::Array>(t.at("paths.feeds").value);
  CHECK(feeds.size() == 2);
  CHECK(std::get<std::string>(feeds[1].value) == "b.json");
  CHECK(std::get<std::string>(t.at("paths.work_dir").value) == "w # not a comment");
  CHECK(std::get<double>(t.at("detector.extra.rate").value) == 0.25);
  CHECK(std::get<bool>(t.at("detector.extra.on").value));
  CHECK(std::get<std::int64_t>(t.at("detector.extra.neg").value) == -3);
  CHECK(std::get<std::string>(parse_toml_value(R"("a\tb\"")", fake_env({})).value) == "a\tb\"");

  CHECK(kind_of([] { parse_toml("a = 1\na = 2", fake_env({})); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([] { parse_toml("a = ", fake_env({})); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([] { parse_toml("[broken\n", fake_env({})); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([] { parse_toml("a = \"open", fake_env({})); }) == ErrorKind::ConfigInvalid);
  try {
    parse_toml("x = 1\ny = nope\n", fake_env({}));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("environment interpolation") {
  auto env = fake_env({{"TOKEN", "s3cret"}});
  CHECK(interpolate("Bearer ${TOKEN}", env) == "Bearer s3cret");
  CHECK(interpolate("${MISSING:-dflt}/x", env) == "dflt/x");
  CHECK(interpolate("${MISSING}", env) == "");
  CHECK(interpolate("no vars $ here", env) == "no vars $ here");
  auto t = parse_toml("[github]\ntoken = \"${TOKEN}\"\n", env);
  CHECK(std::get<std::string>(t.at("github.token").value) == "s3cret");
}

TEST_CASE("config loading, overrides and validation") {
  auto dir = testing::scratch_dir("cfg");
  auto path = dir / "c.toml";
  write_file_atomic(path, "[paths]\nfeeds = [\"nvd/feed.json\"]\nwork_dir = \"out\"\n[run]\nseed = 4\n[github]\ntoken = \"${GH}\"\n");
  auto c = load_config(path, {"detector.epochs=10", "run.offline=true"}, fake_env({{"GH", "gh-s3cr3t-value"}}));
  CHECK(c.seed == 4);
  CHECK(c.epochs == 10);
  CHECK(c.offline);
  CHECK(c.github_token == "gh-s3cr3t-value");
  CHECK(c.work_dir == dir / "out");
  REQUIRE(c.feeds.size() == 1);
  CHECK(c.feeds[0] == dir / "nvd/feed.json");
  CHECK(c.to_json().dump().find("s3cr3t") == std::string::npos);

  CHECK(kind_of([&] { load_config(path, {"detector.bogus=1"}, fake_env({})); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([&] { load_config(path, {"no_equals"}, fake_env({})); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([&] { load_config(path, {"split.ratios=[0.5, 0.1, 0.1]"}, fake_env({})); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([&] { load_config(path, {"detector.threshold=1.5"}, fake_env({})); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([&] { load_config(path, {"detector.feature_config=\"Nope\""}, fake_env({})); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([&] { load_config(path, {"detector.epochs=\"ten\""}, fake_env({})); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([&] { load_config(dir / "absent.toml", {}, fake_env({})); }) == ErrorKind::ConfigInvalid);
  CHECK(load_config(std::nullopt, {}, fake_env({})).pcve_days == 365);
}

TEST_CASE("stage graph") {
  CHECK(all_stages().size() == 10);
  for (auto s : all_stages()) CHECK(stage_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(stage_from_string("deploy"), Error);
  auto p = plan(PipelineConfig{});
  CHECK(p.find("ingest") < p.find("collect"));
  CHECK(p.find("evaluate") < p.find("ablate"));
  CHECK(p.find("dataset.jsonl") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorKind::ConfigInvalid) == 2);
  CHECK(exit_code_for(ErrorKind::MissingUpstream) == 3);
  CHECK(exit_code_for(ErrorKind::RateLimited) == 4);
  CHECK(exit_code_for(ErrorKind::LlmUnavailable) == 4);
  CHECK(exit_code_for(ErrorKind::MalformedDiff) == 1);
}

TEST_CASE("missing upstream files") {
  auto dir = testing::scratch_dir("upstream");
  PipelineConfig c;
  c.work_dir = dir / "work";
  c.offline = true;
  CHECK(kind_of([&] { run_stage(Stage::Evaluate, c); }) == ErrorKind::MissingUpstream);
  CHECK(kind_of([&] { run_stage(Stage::Train, c); }) == ErrorKind::MissingUpstream);
  CHECK(kind_of([&] { run_stage(Stage::Ingest, c); }) == ErrorKind::ConfigInvalid);
  c.feeds = {dir / "absent.json"};
  CHECK(kind_of([&] { run_stage(Stage::Ingest, c); }) == ErrorKind::MissingUpstream);
}

TEST_CASE("offline corpus run end to end, rerun identical") {
  testing::CorpusOptions small;
  small.pcves = 24;
  small.recent = 4;
  small.short_delta = 2;
  small.no_github = 1;
  small.pool = 6;
  auto layout = testing::write_corpus(testing::scratch_dir("e2e"), small);
  auto c = load_config(layout.config);
  for (auto s : all_stages()) {
    INFO(to_string(s));
    auto r = run_stage(s, c);
    CHECK_FALSE(r.written.empty());
    for (const auto& f : r.written) CHECK(std::filesystem::exists(f));
  }
  auto pcves = read_jsonl((c.work_dir / "pcves.jsonl").string());
  CHECK(pcves.size() == 24);
  auto report = parse_json(read_file(c.work_dir / "report.json"), "report");
  CHECK(report["detectors"][0]["detector"] == "DeeptraVul");
  auto first_dataset = read_file(c.work_dir / "dataset.jsonl");
  auto first_model = read_file(c.work_dir / "model.json");
  run_stage(Stage::Build, c);
  run_stage(Stage::Summarize, c);
  run_stage(Stage::Train, c);
  CHECK(read_file(c.work_dir / "dataset.jsonl") == first_dataset);
  CHECK(read_file(c.work_dir / "model.json") == first_model);
}

TEST_CASE("shipped example config loads") {
  auto c = load_config(std::filesystem::path(PCVE_TEST_FIXTURES "/../../config/example.toml"), {}, fake_env({{"GITHUB_TOKEN", "t"}}));
  CHECK(c.feeds.size() == 2);
  CHECK(c.github_token == "t");
  CHECK(plan(c).find("ablate") != std::string::npos);
}
