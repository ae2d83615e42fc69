#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcve/common/error.hpp"
#include "pcve/detector/encoder.hpp"
#include "pcve/github/client.hpp"
#include "pcve/pipeline/config.hpp"
#include "pcve/summarizer/generator.hpp"

namespace pcve::pipeline {

enum class Stage { Ingest, Collect, Timeline, Sample, Build, Summarize, Train, Detect, Evaluate, Ablate };

std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view text);
const std::vector<Stage>& all_stages();

struct StageSpec {
  Stage stage;
  std::vector<std::string> inputs;   // files under work_dir; "feeds" is external
  std::vector<std::string> optional_inputs;
  std::vector<std::string> outputs;
};

const StageSpec& stage_spec(Stage stage);

// Stage graph in execution order with each stage's files. Throws if a stage
// reads a file no earlier stage writes, or two stages write the same file.
std::string plan(const PipelineConfig& config);

// External collaborators. Unset members are built from the config.
struct Services {
  std::shared_ptr<github::ArtifactSource> source;
  std::shared_ptr<summarizer::TextGenerator> llm;
  std::shared_ptr<detector::Encoder> text_encoder;
  std::shared_ptr<detector::Encoder> code_encoder;
};

struct StageResult {
  std::vector<std::filesystem::path> written;
  std::string summary;
};

// Throws MissingUpstream when an input file is absent.
StageResult run_stage(Stage stage, const PipelineConfig& config, Services services = {});

// 0 ok, 2 config, 3 missing upstream, 4 external service, 1 otherwise.
int exit_code_for(ErrorKind kind);

}  // namespace pcve::pipeline
