#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vcalib/builder.hpp"
#include "vcalib/dataset.hpp"
#include "vcalib/gateway.hpp"
#include "vcalib/prompts.hpp"

namespace vcalib {

// Invalid or inconsistent run configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchmarkConfig {
  std::string name;
  std::filesystem::path path;                        // evaluation split
  std::optional<std::filesystem::path> train_path;   // training split (build-data)
  FieldProfile profile;
};

struct RunConfig {
  std::filesystem::path run_dir;
  std::uint64_t seed = 0;
  std::size_t num_bins = 10;
  int turns = 5;
  int parallelism = 1;
  std::vector<ElicitationMode> modes;
  std::size_t sample_size = 0;  // seeded training sample for build-data
  std::optional<std::filesystem::path> template_dir;
  std::optional<std::filesystem::path> cache_dir;  // default: <run_dir>/cache
  ModelConfig student;
  ModelConfig teacher;
  std::vector<BenchmarkConfig> benchmarks;
  std::vector<TrainingVariant> variants;
  bool enable_student_self_critique = false;
  std::string config_hash;  // sha256 of the canonicalized document
};

// Parses and validates a JSON run-config. Relative paths resolve against the
// config file's directory. Throws ConfigError naming the offending field.
RunConfig load_run_config(const std::filesystem::path& path);

PromptLibrary prompt_library_for(const RunConfig& config);

}  // namespace vcalib
