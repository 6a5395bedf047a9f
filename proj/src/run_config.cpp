#include "vcalib/run_config.hpp"

#include <fstream>
#include <set>

#include "json.hpp"
#include "vcalib/hash.hpp"

namespace vcalib {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

const json& require(const json& obj, const std::string& ctx, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) fail(ctx + "." + key, "missing required field");
  return obj.at(key);
}

std::string require_string(const json& obj, const std::string& ctx, const char* key) {
  const json& v = require(obj, ctx, key);
  if (!v.is_string() || v.get<std::string>().empty())
    fail(ctx + "." + key, "must be a non-empty string");
  return v.get<std::string>();
}

std::string optional_string(const json& obj, const std::string& ctx, const char* key,
                            const std::string& fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  if (!obj.at(key).is_string()) fail(ctx + "." + key, "must be a string");
  return obj.at(key).get<std::string>();
}

template <typename T>
T optional_number(const json& obj, const std::string& ctx, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  if (!obj.at(key).is_number()) fail(ctx + "." + key, "must be a number");
  return obj.at(key).get<T>();
}

bool optional_bool(const json& obj, const std::string& ctx, const char* key, bool fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  if (!obj.at(key).is_boolean()) fail(ctx + "." + key, "must be a boolean");
  return obj.at(key).get<bool>();
}

ModelConfig parse_model(const json& obj, const std::string& ctx) {
  ModelConfig m;
  m.endpoint_url = require_string(obj, ctx, "endpoint_url");
  m.model_name = require_string(obj, ctx, "model_name");
  m.temperature = optional_number<double>(obj, ctx, "temperature", 0.0);
  m.max_output_tokens = optional_number<int>(obj, ctx, "max_output_tokens", 1024);
  m.timeout = std::chrono::milliseconds(optional_number<int>(obj, ctx, "timeout_ms", 30000));
  m.max_retries = optional_number<int>(obj, ctx, "max_retries", 2);
  m.is_reasoning_model = optional_bool(obj, ctx, "is_reasoning_model", false);
  m.api_key_env = optional_string(obj, ctx, "api_key_env", "");
  try {
    validate(m);
  } catch (const std::invalid_argument& e) {
    fail(ctx, e.what());
  }
  return m;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

BenchmarkConfig parse_benchmark(const json& obj, const std::string& ctx,
                                const std::filesystem::path& base) {
  BenchmarkConfig b;
  b.name = require_string(obj, ctx, "name");
  b.path = resolve(base, require_string(obj, ctx, "path"));
  if (!std::filesystem::is_regular_file(b.path))
    fail(ctx + ".path", "dataset file does not exist: " + b.path.string());
  std::string train = optional_string(obj, ctx, "train_path", "");
  if (!train.empty()) {
    b.train_path = resolve(base, train);
    if (!std::filesystem::is_regular_file(*b.train_path))
      fail(ctx + ".train_path", "dataset file does not exist: " + b.train_path->string());
    // Leakage guard: the training sample must never come from the
    // evaluation file.
    if (std::filesystem::weakly_canonical(*b.train_path) ==
        std::filesystem::weakly_canonical(b.path))
      fail(ctx + ".train_path", "training and evaluation files must differ");
  }

  std::string type_name = require_string(obj, ctx, "question_type");
  try {
    b.profile.question_type = question_type_from_string(type_name);
  } catch (const std::invalid_argument& e) {
    fail(ctx + ".question_type", e.what());
  }

  const json& fields = require(obj, ctx, "fields");
  const std::string fctx = ctx + ".fields";
  b.profile.name = b.name;
  b.profile.id_field = require_string(fields, fctx, "id");
  b.profile.question_field = require_string(fields, fctx, "question");
  b.profile.gold_answer_field = require_string(fields, fctx, "gold_answer");
  b.profile.reference_solution_field = optional_string(fields, fctx, "reference_solution", "");
  b.profile.choices_field = optional_string(fields, fctx, "choices", "");
  if (b.profile.question_type == QuestionType::multiple_choice && b.profile.choices_field.empty())
    fail(fctx + ".choices", "required for multiple_choice benchmarks");
  return b;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open run config: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("run config is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw ConfigError("run config must be a JSON object");
  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";
  const std::string ctx = "config";

  RunConfig cfg;
  // Canonical dump (sorted keys) so formatting differences do not change
  // the hash while any semantic difference does.
  cfg.config_hash = sha256_hex(doc.dump());

  cfg.run_dir = resolve(base, require_string(doc, ctx, "run_dir"));
  cfg.seed = optional_number<std::uint64_t>(doc, ctx, "seed", 0);
  cfg.num_bins = optional_number<std::size_t>(doc, ctx, "num_bins", 10);
  if (cfg.num_bins == 0) fail(ctx + ".num_bins", "must be >= 1");
  cfg.turns = optional_number<int>(doc, ctx, "turns", 5);
  if (cfg.turns < 0) fail(ctx + ".turns", "must be >= 0");
  cfg.parallelism = optional_number<int>(doc, ctx, "parallelism", 1);
  if (cfg.parallelism < 1) fail(ctx + ".parallelism", "must be >= 1");
  cfg.sample_size = optional_number<std::size_t>(doc, ctx, "sample_size", 0);

  const json& modes = require(doc, ctx, "modes");
  if (!modes.is_array() || modes.empty()) fail(ctx + ".modes", "must be a non-empty array");
  for (const auto& m : modes) {
    if (!m.is_string()) fail(ctx + ".modes", "entries must be strings");
    try {
      cfg.modes.push_back(mode_from_string(m.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      fail(ctx + ".modes", e.what());
    }
  }

  std::string template_dir = optional_string(doc, ctx, "template_dir", "");
  if (!template_dir.empty()) {
    cfg.template_dir = resolve(base, template_dir);
    if (!std::filesystem::is_directory(*cfg.template_dir))
      fail(ctx + ".template_dir", "directory does not exist: " + cfg.template_dir->string());
  }
  std::string cache_dir = optional_string(doc, ctx, "cache_dir", "");
  if (!cache_dir.empty()) cfg.cache_dir = resolve(base, cache_dir);

  cfg.student = parse_model(require(doc, ctx, "student"), ctx + ".student");
  cfg.teacher = doc.contains("teacher") && !doc.at("teacher").is_null()
                    ? parse_model(doc.at("teacher"), ctx + ".teacher")
                    : cfg.student;

  const json& benchmarks = require(doc, ctx, "benchmarks");
  if (!benchmarks.is_array() || benchmarks.empty())
    fail(ctx + ".benchmarks", "must be a non-empty array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < benchmarks.size(); ++i) {
    std::string bctx = ctx + ".benchmarks[" + std::to_string(i) + "]";
    BenchmarkConfig b = parse_benchmark(benchmarks.at(i), bctx, base);
    if (!names.insert(b.name).second) fail(bctx + ".name", "duplicate benchmark name");
    cfg.benchmarks.push_back(std::move(b));
  }

  if (doc.contains("data") && !doc.at("data").is_null()) {
    const json& data = doc.at("data");
    const std::string dctx = ctx + ".data";
    cfg.enable_student_self_critique =
        optional_bool(data, dctx, "enable_student_self_critique", false);
    if (data.contains("variants")) {
      const json& variants = data.at("variants");
      if (!variants.is_array()) fail(dctx + ".variants", "must be an array");
      for (const auto& v : variants) {
        if (!v.is_string()) fail(dctx + ".variants", "entries must be strings");
        try {
          cfg.variants.push_back(training_variant_from_string(v.get<std::string>()));
        } catch (const std::invalid_argument& e) {
          fail(dctx + ".variants", e.what());
        }
      }
    }
    for (TrainingVariant v : cfg.variants) {
      if (v == TrainingVariant::dpo && !cfg.enable_student_self_critique)
        fail(dctx + ".variants",
             "dpo needs data.enable_student_self_critique = true (the rejected "
             "response is the student's own critique)");
    }
  }

  return cfg;
}

PromptLibrary prompt_library_for(const RunConfig& config) {
  if (config.template_dir) return PromptLibrary::load_dir(*config.template_dir);
  return PromptLibrary::builtin();
}

}  // namespace vcalib
