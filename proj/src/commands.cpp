#include "vcalib/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vcalib/hash.hpp"
#include "vcalib/metrics.hpp"
#include "vcalib/orchestrator.hpp"
#include "vcalib/parser.hpp"

namespace vcalib {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct IngestErrorRow {
  std::string benchmark;
  std::size_t line;
  std::string message;
};

std::filesystem::path reports_dir(const RunConfig& cfg) { return cfg.run_dir / "reports"; }
std::filesystem::path traces_dir(const RunConfig& cfg) { return cfg.run_dir / "traces"; }
std::filesystem::path datasets_dir(const RunConfig& cfg) { return cfg.run_dir / "datasets"; }

void prepare_run_dir(const RunConfig& cfg) {
  std::filesystem::create_directories(reports_dir(cfg));
  std::filesystem::create_directories(traces_dir(cfg));
  std::filesystem::create_directories(datasets_dir(cfg));
}

std::shared_ptr<ResponseCache> open_cache(const RunConfig& cfg) {
  auto dir = cfg.cache_dir ? *cfg.cache_dir : cfg.run_dir / "cache";
  return std::make_shared<ResponseCache>(dir / "cache.jsonl");
}

// Shortest round-trip formatting keeps CSV output byte-reproducible.
std::string fmt(double v) { return format_double(v); }

std::string fmt4(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string fmt_auroc_csv(const std::optional<double>& v) { return v ? fmt(*v) : ""; }
std::string fmt_auroc_md(const std::optional<double>& v) { return v ? fmt4(*v) : "undefined"; }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_ingest_errors(const RunConfig& cfg, const std::vector<IngestErrorRow>& errors) {
  auto out = open_output(cfg.run_dir / "ingest_errors.jsonl");
  for (const auto& e : errors) {
    out << ordered_json{{"benchmark", e.benchmark}, {"line", e.line}, {"message", e.message}}
               .dump()
        << '\n';
  }
}

void collect_ingest_errors(std::vector<IngestErrorRow>& sink, const std::string& benchmark,
                           const LoadResult& lr) {
  for (const auto& e : lr.errors) sink.push_back({benchmark, e.line, e.message});
}

// manifest.json accumulates one entry per command, deterministically.
void update_manifest(const RunConfig& cfg, const std::string& command, const json& payload) {
  const auto path = cfg.run_dir / "manifest.json";
  json manifest = json::object();
  if (std::filesystem::is_regular_file(path)) {
    std::ifstream in(path);
    try {
      manifest = json::parse(in);
    } catch (const json::exception&) {
      manifest = json::object();
    }
  }
  manifest["config_hash"] = cfg.config_hash;
  manifest["seed"] = cfg.seed;
  manifest["num_bins"] = cfg.num_bins;
  manifest["turns"] = cfg.turns;
  manifest["std_convention"] = "population";
  manifest["commands"][command] = payload;
  auto out = open_output(path);
  out << manifest.dump(2) << '\n';
}

std::vector<JudgedResponse> judged_at_iteration(const std::vector<IterationTrace>& traces,
                                                std::size_t iteration) {
  std::vector<JudgedResponse> out;
  out.reserve(traces.size());
  for (const auto& t : traces) {
    if (iteration < t.entries.size())
      out.push_back({t.entries[iteration].response, t.entries[iteration].correct});
    else
      out.push_back({ScoredResponse{}, false});  // truncated trace: counts as unscored
  }
  return out;
}

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<IterationTrace>& traces, std::size_t num_bins,
                      const std::string& config_hash) {
  auto out = open_output(path);
  out << "# config_hash=" << config_hash << '\n';
  out << "iteration,metric,mean,std\n";
  for (IterationMetric metric : {IterationMetric::acc, IterationMetric::ece,
                                 IterationMetric::auroc, IterationMetric::mean_score}) {
    for (const IterationStat& s : iteration_stats(traces, metric, num_bins))
      out << s.iteration << ',' << to_string(metric) << ',' << fmt(s.mean) << ','
          << fmt(s.stddev) << '\n';
  }
}

void write_bins_csv(const std::filesystem::path& path, const std::vector<ReliabilityBin>& bins,
                    const std::string& config_hash) {
  auto out = open_output(path);
  out << "# config_hash=" << config_hash << '\n';
  out << "lower,upper,count,mean_confidence,empirical_accuracy\n";
  for (const auto& b : bins)
    out << fmt(b.lower) << ',' << fmt(b.upper) << ',' << b.count << ','
        << fmt(b.mean_confidence) << ',' << fmt(b.empirical_accuracy) << '\n';
}

struct EvaluateRow {
  std::string benchmark;
  ElicitationMode mode;
  MetricReport report;
};

void write_evaluate_files(const RunConfig& cfg, const std::string& benchmark,
                          const std::vector<EvaluateRow>& rows) {
  auto csv = open_output(reports_dir(cfg) / ("evaluate_" + benchmark + ".csv"));
  csv << "# config_hash=" << cfg.config_hash << '\n';
  csv << "benchmark,mode,n,accuracy,ece,auroc,parse_failure_rate,mean_score_percent,num_bins\n";
  for (const auto& row : rows) {
    const MetricReport& r = row.report;
    csv << benchmark << ',' << to_string(row.mode) << ',' << r.n << ',' << fmt(r.accuracy) << ','
        << fmt(r.ece) << ',' << fmt_auroc_csv(r.auroc) << ',' << fmt(r.parse_failure_rate) << ','
        << fmt(r.mean_score_percent) << ',' << r.num_bins << '\n';
  }

  auto md = open_output(reports_dir(cfg) / ("evaluate_" + benchmark + ".md"));
  md << "# Vanilla elicitation: " << benchmark << "\n\n";
  md << "| Mode | N | ACC | ECE | AUROC | Parse failure rate | Mean score % |\n";
  md << "| --- | --- | --- | --- | --- | --- | --- |\n";
  for (const auto& row : rows) {
    const MetricReport& r = row.report;
    md << "| " << to_string(row.mode) << " | " << r.n << " | " << fmt4(r.accuracy) << " | "
       << fmt4(r.ece) << " | " << fmt_auroc_md(r.auroc) << " | " << fmt4(r.parse_failure_rate)
       << " | " << fmt4(r.mean_score_percent) << " |\n";
  }
  md << "\nnum_bins: " << cfg.num_bins << " (equal width; population std convention)\n";
  md << "\nconfig_hash: " << cfg.config_hash << "\n";
}

int run_elicitation(const RunConfig& cfg, int turns, const char* command) {
  prepare_run_dir(cfg);
  const PromptLibrary prompts = prompt_library_for(cfg);
  auto cache = open_cache(cfg);
  Gateway student = make_gateway(cfg.student, cache);

  std::vector<IngestErrorRow> ingest_errors;
  json payload = json::object();
  for (const auto& bench : cfg.benchmarks) {
    LoadResult lr = load_dataset(bench.path, bench.profile);
    collect_ingest_errors(ingest_errors, bench.name, lr);
    std::vector<EvaluateRow> rows;
    for (ElicitationMode mode : cfg.modes) {
      auto traces =
          run_cohort(lr.records, mode, turns, student, cfg.student, prompts, cfg.parallelism);
      const std::string stem = bench.name + "_" + to_string(mode);
      write_traces(traces_dir(cfg) / (stem + ".jsonl"), traces, cfg.config_hash);
      MetricReport report = make_report(judged_at_iteration(traces, 0), cfg.num_bins);
      rows.push_back({bench.name, mode, report});
      if (turns > 0)
        write_series_csv(reports_dir(cfg) / ("series_" + stem + ".csv"), traces, cfg.num_bins,
                         cfg.config_hash);
      std::size_t incomplete = 0;
      for (const auto& t : traces) incomplete += t.complete ? 0 : 1;
      payload[bench.name][to_string(mode)] = {
          {"records", lr.records.size()},
          {"scored", report.n},
          {"incomplete_traces", incomplete},
      };
    }
    write_evaluate_files(cfg, bench.name, rows);
  }
  write_ingest_errors(cfg, ingest_errors);
  update_manifest(cfg, command, payload);
  return 0;
}

}  // namespace

int run_evaluate(const RunConfig& config) { return run_elicitation(config, 0, "evaluate"); }

int run_self_critique(const RunConfig& config) {
  return run_elicitation(config, config.turns, "self-critique");
}

int run_build_data(const RunConfig& config, std::vector<TrainingVariant> variants) {
  if (variants.empty()) variants = config.variants;
  if (variants.empty())
    throw ConfigError("config.data.variants: no training variants configured or requested");
  {
    std::set<TrainingVariant> seen;
    std::vector<TrainingVariant> unique;
    for (TrainingVariant v : variants)
      if (seen.insert(v).second) unique.push_back(v);
    variants = std::move(unique);
  }
  const bool want_dpo =
      std::find(variants.begin(), variants.end(), TrainingVariant::dpo) != variants.end();
  const bool want_critique =
      want_dpo || std::find(variants.begin(), variants.end(), TrainingVariant::critical_sft) !=
                      variants.end();
  if (want_dpo && !config.enable_student_self_critique)
    throw ConfigError(
        "config.data.variants: dpo needs data.enable_student_self_critique = true (the "
        "rejected response is the student's own critique)");
  if (config.sample_size == 0)
    throw ConfigError("config.sample_size: must be >= 1 for build-data");

  prepare_run_dir(config);
  const PromptLibrary prompts = prompt_library_for(config);
  auto cache = open_cache(config);
  Gateway student = make_gateway(config.student, cache);
  Gateway teacher = make_gateway(config.teacher, cache);

  std::map<TrainingVariant, std::ofstream> files;
  std::map<std::string, std::size_t> emitted;
  for (TrainingVariant v : variants) {
    files.emplace(v, open_output(datasets_dir(config) / (std::string(to_string(v)) + ".jsonl")));
    emitted[to_string(v)] = 0;
  }

  std::vector<IngestErrorRow> ingest_errors;
  std::size_t parse_failures = 0, transport_failures = 0, critique_failures = 0;
  std::size_t missing_self_critique = 0, degenerate_dpo = 0;

  for (std::size_t bi = 0; bi < config.benchmarks.size(); ++bi) {
    const BenchmarkConfig& bench = config.benchmarks[bi];
    if (!bench.train_path)
      throw ConfigError("config.benchmarks[" + std::to_string(bi) +
                        "].train_path: required for build-data");
    LoadResult lr = load_dataset(*bench.train_path, bench.profile);
    collect_ingest_errors(ingest_errors, bench.name, lr);
    std::vector<QARecord> sampled;
    try {
      sampled = sample_training_questions(lr.records, config.sample_size, config.seed);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config.sample_size: " + std::string(e.what()) + " (benchmark '" +
                        bench.name + "')");
    }

    for (ElicitationMode mode : config.modes) {
      std::vector<std::string> vanilla_prompts;
      vanilla_prompts.reserve(sampled.size());
      for (const auto& rec : sampled) vanilla_prompts.push_back(prompts.render_vanilla(rec, mode));
      auto answers = student.complete_batch(vanilla_prompts, config.student, config.parallelism);

      struct Row {
        const QARecord* record = nullptr;
        ScoredResponse response;
        bool correct = false;
        std::string teacher_text;
        std::string self_text;
      };
      std::vector<Row> rows;
      for (std::size_t i = 0; i < sampled.size(); ++i) {
        if (!answers[i].result) {
          ++transport_failures;
          continue;
        }
        ScoredResponse parsed = parse_scored_answer(answers[i].result->raw_text, mode,
                                                    sampled[i].question_type);
        if (parsed.parse_status != ParseStatus::ok &&
            parsed.parse_status != ParseStatus::clamped) {
          ++parse_failures;
          continue;
        }
        Row row;
        row.record = &sampled[i];
        row.correct = judge_correct(parsed, sampled[i]);
        row.response = std::move(parsed);
        rows.push_back(std::move(row));
      }

      if (want_critique) {
        std::vector<std::string> critique_prompts;
        critique_prompts.reserve(rows.size());
        for (const auto& row : rows)
          critique_prompts.push_back(prompts.render_critique_generation(
              *row.record, row.response.raw_text, config.student.is_reasoning_model));
        auto critiques = teacher.complete_batch(critique_prompts, config.teacher,
                                                config.parallelism);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (critiques[i].result)
            rows[i].teacher_text = critiques[i].result->raw_text;
          else
            ++critique_failures;
        }
        if (want_dpo) {
          auto self_critiques =
              student.complete_batch(critique_prompts, config.student, config.parallelism);
          for (std::size_t i = 0; i < rows.size(); ++i) {
            if (self_critiques[i].result)
              rows[i].self_text = self_critiques[i].result->raw_text;
            else
              ++missing_self_critique;
          }
        }
      }

      for (const auto& row : rows) {
        for (TrainingVariant v : variants) {
          std::optional<TrainingExample> ex;
          switch (v) {
            case TrainingVariant::sft_hard:
              ex = build_hard_label(*row.record, row.response, row.correct, prompts);
              break;
            case TrainingVariant::sft_soft:
              ex = build_soft_label(*row.record, row.response, row.correct, prompts);
              break;
            case TrainingVariant::critical_sft: {
              if (row.teacher_text.empty()) break;
              CritiqueRecord critique =
                  make_critique_record(*row.record, row.response, row.teacher_text,
                                       config.student.is_reasoning_model);
              ex = build_critical_sft(*row.record, row.response, critique, prompts);
              break;
            }
            case TrainingVariant::dpo: {
              if (row.teacher_text.empty() || row.self_text.empty()) break;
              CritiqueRecord critique =
                  make_critique_record(*row.record, row.response, row.teacher_text,
                                       config.student.is_reasoning_model);
              ex = build_dpo_pair(*row.record, row.response, critique, row.self_text, prompts);
              if (!ex) ++degenerate_dpo;
              break;
            }
          }
          if (!ex) continue;
          files.at(v) << to_jsonl_line(*ex, config.config_hash) << '\n';
          ++emitted[to_string(v)];
        }
      }
    }
  }

  write_ingest_errors(config, ingest_errors);
  json payload = {
      {"sample_size", config.sample_size},
      {"seed", config.seed},
      {"emitted", emitted},
      {"exclusions",
       {{"parse_failures", parse_failures},
        {"transport_failures", transport_failures},
        {"critique_failures", critique_failures},
        {"missing_self_critique", missing_self_critique},
        {"degenerate_dpo_pairs", degenerate_dpo}}},
  };
  update_manifest(config, "build-data", payload);

  auto manifest_out = open_output(datasets_dir(config) / "manifest.json");
  json dataset_manifest = {
      {"config_hash", config.config_hash},
      {"seed", config.seed},
      {"sample_size", config.sample_size},
      {"counts", emitted},
      {"exclusions", payload.at("exclusions")},
  };
  manifest_out << dataset_manifest.dump(2) << '\n';

  std::size_t total = 0;
  for (const auto& [name, count] : emitted) total += count;
  return total == 0 ? 2 : 0;
}

int run_report(const std::filesystem::path& run_dir) {
  if (!std::filesystem::is_directory(run_dir))
    throw std::runtime_error("run directory does not exist: " + run_dir.string());

  std::string config_hash;
  std::size_t num_bins = 10;
  const auto manifest_path = run_dir / "manifest.json";
  if (std::filesystem::is_regular_file(manifest_path)) {
    std::ifstream in(manifest_path);
    try {
      json manifest = json::parse(in);
      config_hash = manifest.value("config_hash", "");
      num_bins = manifest.value("num_bins", std::size_t{10});
    } catch (const json::exception&) {
    }
  }

  std::vector<std::filesystem::path> trace_files;
  const auto traces = run_dir / "traces";
  if (std::filesystem::is_directory(traces))
    for (const auto& entry : std::filesystem::directory_iterator(traces))
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
        trace_files.push_back(entry.path());
  std::sort(trace_files.begin(), trace_files.end());
  if (trace_files.empty())
    throw std::runtime_error("no traces found under " + traces.string() +
                             "; run evaluate or self-critique first");

  const auto reports = run_dir / "reports";
  std::filesystem::create_directories(reports);

  std::ostringstream vanilla_table, trajectory_table;
  vanilla_table << "| Benchmark | Mode | N | ACC | ECE | AUROC | Parse failure rate |\n"
                << "| --- | --- | --- | --- | --- | --- | --- |\n";
  trajectory_table << "| Benchmark | Mode | Metric | Mean over iterations | Std over iterations "
                      "|\n| --- | --- | --- | --- | --- |\n";

  for (const auto& file : trace_files) {
    const std::string stem = file.stem().string();
    std::size_t split = stem.rfind('_');
    const std::string benchmark = split == std::string::npos ? stem : stem.substr(0, split);
    const std::string mode = split == std::string::npos ? "?" : stem.substr(split + 1);

    auto trace_set = read_traces(file);
    MetricReport vanilla = make_report(judged_at_iteration(trace_set, 0), num_bins);

    std::vector<CalibrationPoint> points;
    for (const auto& jr : judged_at_iteration(trace_set, 0)) {
      if (jr.response.parse_status == ParseStatus::ok ||
          jr.response.parse_status == ParseStatus::clamped)
        points.push_back(to_calibration_point(jr.response, jr.correct));
    }
    write_bins_csv(reports / ("bins_" + stem + ".csv"), reliability_bins(points, num_bins),
                   config_hash);
    write_series_csv(reports / ("series_" + stem + ".csv"), trace_set, num_bins, config_hash);

    vanilla_table << "| " << benchmark << " | " << mode << " | " << vanilla.n << " | "
                  << fmt4(vanilla.accuracy) << " | " << fmt4(vanilla.ece) << " | "
                  << fmt_auroc_md(vanilla.auroc) << " | " << fmt4(vanilla.parse_failure_rate)
                  << " |\n";

    for (IterationMetric metric : {IterationMetric::acc, IterationMetric::ece,
                                   IterationMetric::auroc, IterationMetric::mean_score}) {
      auto stats = iteration_stats(trace_set, metric, num_bins);
      if (stats.empty()) continue;
      double sum = 0.0;
      for (const auto& s : stats) sum += s.mean;
      double mean = sum / static_cast<double>(stats.size());
      double var = 0.0;
      for (const auto& s : stats) var += (s.mean - mean) * (s.mean - mean);
      double stddev = std::sqrt(var / static_cast<double>(stats.size()));
      trajectory_table << "| " << benchmark << " | " << mode << " | " << to_string(metric)
                       << " | " << fmt4(mean) << " | " << fmt4(stddev) << " |\n";
    }
  }

  auto md = open_output(reports / "summary.md");
  md << "# Run summary\n\n";
  md << "## Vanilla metrics (iteration 0)\n\n" << vanilla_table.str() << '\n';
  md << "## Trajectories across self-critique iterations\n\n" << trajectory_table.str() << '\n';
  md << "Standard deviations use the population convention.\n";
  md << "\nconfig_hash: " << config_hash << "\n";
  return 0;
}

}  // namespace vcalib
