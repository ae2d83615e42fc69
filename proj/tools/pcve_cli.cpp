// pcve: command-line driver for the pipeline stages.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcve/common/error.hpp"
#include "pcve/pipeline/config.hpp"
#include "pcve/pipeline/stages.hpp"

namespace {

using pcve::pipeline::Stage;

int run(Stage first, Stage last, const pcve::pipeline::PipelineConfig& config) {
  const auto& stages = pcve::pipeline::all_stages();
  bool active = false;
  for (auto stage : stages) {
    if (stage == first) active = true;
    if (!active) continue;
    auto result = pcve::pipeline::run_stage(stage, config);
    std::cout << pcve::pipeline::to_string(stage) << ": " << result.summary << "\n";
    for (const auto& path : result.written) std::cout << "  wrote " << path.string() << "\n";
    if (stage == last) break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch-to-disclosure timeline analysis and pre-disclosure vulnerability detection"};
  app.require_subcommand(1, 1);
  app.fallthrough();  // global flags may follow the subcommand

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  bool offline = false;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "TOML configuration file");
  app.add_option("--seed", seed, "override run.seed");
  app.add_flag("--offline", offline, "serve GitHub from fixtures, use local text generation and hashing encoders");
  app.add_option("--set", overrides, "override a config key, e.g. --set thresholds.k=3")->take_all();

  std::vector<std::pair<CLI::App*, Stage>> stage_commands;
  for (auto stage : pcve::pipeline::all_stages()) {
    std::string name(pcve::pipeline::to_string(stage));
    stage_commands.emplace_back(app.add_subcommand(name, "run the " + name + " stage"), stage);
  }
  auto* all = app.add_subcommand("all", "run every stage in order");
  std::string from = "ingest";
  std::string to = "ablate";
  all->add_option("--from", from, "first stage");
  all->add_option("--to", to, "last stage");
  auto* plan = app.add_subcommand("plan", "print the stage graph and resolved configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors share the config exit code
  }

  try {
    if (seed) overrides.push_back("run.seed=" + std::to_string(*seed));
    if (offline) overrides.push_back("run.offline=true");
    std::optional<std::filesystem::path> path;
    if (config_path) path = *config_path;
    auto config = pcve::pipeline::load_config(path, overrides);

    if (plan->parsed()) {
      std::cout << pcve::pipeline::plan(config);
      std::cout << config.to_json().dump(2) << "\n";
      return 0;
    }
    if (all->parsed()) {
      auto a = pcve::pipeline::stage_from_string(from);
      auto b = pcve::pipeline::stage_from_string(to);
      if (static_cast<int>(b) < static_cast<int>(a)) {
        pcve::fail(pcve::ErrorKind::ConfigInvalid, "--to comes before --from");
      }
      return run(a, b, config);
    }
    for (const auto& [cmd, stage] : stage_commands) {
      if (cmd->parsed()) return run(stage, stage, config);
    }
  } catch (const pcve::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pcve::pipeline::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
