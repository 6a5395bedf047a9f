#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vcalib/builder.hpp"
#include "vcalib/commands.hpp"
#include "vcalib/run_config.hpp"

namespace {

int dispatch(const std::string& command, const std::string& config_path,
             const std::string& run_dir, const std::vector<std::string>& variant_names) {
  using namespace vcalib;
  if (command == "report" && config_path.empty())
    return run_report(std::filesystem::path(run_dir));

  RunConfig config = load_run_config(config_path);
  if (command == "evaluate") return run_evaluate(config);
  if (command == "self-critique") return run_self_critique(config);
  if (command == "report") return run_report(config.run_dir);

  std::vector<TrainingVariant> variants;
  for (const auto& name : variant_names) {
    try {
      variants.push_back(training_variant_from_string(name));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("--variant: " + std::string(e.what()));
    }
  }
  return run_build_data(config, variants);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verbalized-confidence calibration harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string run_dir;
  std::vector<std::string> variant_names;

  auto* evaluate = app.add_subcommand("evaluate", "single-turn elicitation and calibration report");
  evaluate->add_option("--config", config_path, "run configuration JSON")->required();

  auto* critique = app.add_subcommand("self-critique", "multi-turn self-critique traces");
  critique->add_option("--config", config_path, "run configuration JSON")->required();

  auto* build = app.add_subcommand("build-data", "emit training datasets as JSONL");
  build->add_option("--config", config_path, "run configuration JSON")->required();
  build->add_option("--variant", variant_names,
                    "variant to build (repeatable; default: all configured)");

  auto* report = app.add_subcommand("report", "regenerate reports from stored traces");
  auto* report_config = report->add_option("--config", config_path, "run configuration JSON");
  report->add_option("--run-dir", run_dir, "run directory to report on")->excludes(report_config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (command == "report" && config_path.empty() && run_dir.empty()) {
    std::fprintf(stderr, "config error: report needs --config or --run-dir\n");
    return 1;
  }

  try {
    return dispatch(command, config_path, run_dir, variant_names);
  } catch (const vcalib::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
