#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "temp_dir.hpp"

using nlohmann::json;

namespace {

std::string g_binary;   // the CLI under test
std::string g_toy_dir;  // bundled toy benchmark assets

int run_cli(const std::string& args, const std::filesystem::path& stderr_file = {}) {
  std::string cmd = "\"" + g_binary + "\" " + args + " >/dev/null";
  cmd += stderr_file.empty() ? " 2>/dev/null" : " 2>\"" + stderr_file.string() + "\"";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::size_t count_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

struct CliWorkspace {
  TempDir dir{"cli"};
  std::filesystem::path run_dir;
  std::filesystem::path config_path;

  explicit CliWorkspace(bool enable_self_critique = true) {
    run_dir = dir.path / "run";
    json cfg;
    cfg["run_dir"] = run_dir.string();
    cfg["seed"] = 11;
    cfg["turns"] = 2;
    cfg["parallelism"] = 4;
    cfg["sample_size"] = 10;
    cfg["modes"] = {"confidence", "uncertainty"};
    cfg["student"] = {{"endpoint_url", "mock"}, {"model_name", "cli-student"}};
    cfg["teacher"] = {{"endpoint_url", "mock"}, {"model_name", "cli-teacher"}};
    cfg["benchmarks"] = json::array({{
        {"name", "toy"},
        {"path", g_toy_dir + "/toy_eval.jsonl"},
        {"train_path", g_toy_dir + "/toy_train.jsonl"},
        {"question_type", "yes_no"},
        {"fields",
         {{"id", "qid"},
          {"question", "question"},
          {"gold_answer", "answer"},
          {"reference_solution", "facts"}}},
    }});
    json variants = {"critical_sft", "sft_hard", "sft_soft"};
    if (enable_self_critique) variants.push_back("dpo");
    cfg["data"] = {{"enable_student_self_critique", enable_self_critique},
                   {"variants", variants}};
    config_path = write_file(dir.path / "run.json", cfg.dump(2));
  }

  std::string config_arg() const { return "--config \"" + config_path.string() + "\""; }
};

}  // namespace

TEST_CASE("usage errors exit with status 1") {
  TempDir dir("cli_usage");
  CHECK(run_cli("") == 1);                     // a subcommand is required
  CHECK(run_cli("frobnicate") == 1);           // unknown subcommand
  CHECK(run_cli("evaluate") == 1);             // --config is required
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("evaluate --help") == 0);

  auto captured = dir.path / "stderr.txt";
  CHECK(run_cli("evaluate --config " + (dir.path / "missing.json").string(), captured) == 1);
  CHECK(read_file(captured).find("config error") != std::string::npos);

  write_file(dir.path / "broken.json", "{not json");
  CHECK(run_cli("evaluate --config " + (dir.path / "broken.json").string(), captured) == 1);
  CHECK(read_file(captured).find("config error") != std::string::npos);
}

TEST_CASE("report needs exactly one source flag") {
  TempDir dir("cli_report_flags");
  auto captured = dir.path / "stderr.txt";
  CHECK(run_cli("report", captured) == 1);
  CHECK(read_file(captured).find("config error") != std::string::npos);

  CliWorkspace ws;
  CHECK(run_cli("report " + ws.config_arg() + " --run-dir \"" + ws.run_dir.string() + "\"") == 1);
}

TEST_CASE("runtime failures exit with status 2") {
  TempDir dir("cli_runtime");
  auto captured = dir.path / "stderr.txt";
  CHECK(run_cli("report --run-dir \"" + (dir.path / "nowhere").string() + "\"", captured) == 2);
  CHECK(read_file(captured).find("error:") != std::string::npos);

  // a directory with no traces is a runtime failure too
  std::filesystem::create_directories(dir.path / "empty_run");
  CHECK(run_cli("report --run-dir \"" + (dir.path / "empty_run").string() + "\"") == 2);
}

TEST_CASE("bad --variant values are config errors") {
  CliWorkspace ws;
  TempDir dir("cli_variant");
  auto captured = dir.path / "stderr.txt";
  CHECK(run_cli("build-data " + ws.config_arg() + " --variant bogus", captured) == 1);
  CHECK(read_file(captured).find("config error") != std::string::npos);
  CHECK(read_file(captured).find("--variant") != std::string::npos);
}

TEST_CASE("dpo on the command line still requires the self-critique pass") {
  CliWorkspace ws(/*enable_self_critique=*/false);
  TempDir dir("cli_dpo");
  auto captured = dir.path / "stderr.txt";
  CHECK(run_cli("build-data " + ws.config_arg() + " --variant dpo", captured) == 1);
  CHECK(read_file(captured).find("enable_student_self_critique") != std::string::npos);
}

TEST_CASE("the full pipeline runs end to end over the bundled toy benchmark") {
  CliWorkspace ws;

  CHECK(run_cli("evaluate " + ws.config_arg()) == 0);
  CHECK(std::filesystem::exists(ws.run_dir / "reports" / "evaluate_toy.csv"));
  CHECK(count_lines(ws.run_dir / "traces" / "toy_confidence.jsonl") == 50);
  CHECK(count_lines(ws.run_dir / "traces" / "toy_uncertainty.jsonl") == 50);

  CHECK(run_cli("self-critique " + ws.config_arg()) == 0);
  CHECK(std::filesystem::exists(ws.run_dir / "reports" / "series_toy_confidence.csv"));
  CHECK(std::filesystem::exists(ws.run_dir / "reports" / "series_toy_uncertainty.csv"));

  CHECK(run_cli("build-data " + ws.config_arg()) == 0);
  for (const char* variant : {"critical_sft", "sft_hard", "sft_soft", "dpo"}) {
    auto path = ws.run_dir / "datasets" / (std::string(variant) + ".jsonl");
    CAPTURE(variant);
    CHECK(count_lines(path) > 0);
  }

  CHECK(run_cli("report --run-dir \"" + ws.run_dir.string() + "\"") == 0);
  CHECK(std::filesystem::exists(ws.run_dir / "reports" / "summary.md"));
  CHECK(std::filesystem::exists(ws.run_dir / "reports" / "bins_toy_confidence.csv"));

  // report accepts --config as an alternative source of the run directory
  CHECK(run_cli("report " + ws.config_arg()) == 0);
}

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: test_cli <vcalib-binary> <toy-asset-dir> [doctest args]\n");
    return 64;
  }
  g_binary = argv[1];
  g_toy_dir = argv[2];
  std::vector<const char*> args;
  args.push_back(argv[0]);
  for (int i = 3; i < argc; ++i) args.push_back(argv[i]);
  doctest::Context context(static_cast<int>(args.size()), args.data());
  return context.run();
}
