#include "vcalib/orchestrator.hpp"

#include <atomic>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "vcalib/parser.hpp"

namespace vcalib {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json response_to_json(const ScoredResponse& r) {
  ordered_json j = {
      {"raw_text", r.raw_text},
      {"reasoning", r.reasoning},
      {"answer", r.answer},
      {"answer_raw", r.answer_raw},
      {"mode", to_string(r.mode)},
      {"parse_status", to_string(r.parse_status)},
  };
  if (r.score_percent) j["score_percent"] = *r.score_percent;
  return j;
}

ScoredResponse response_from_json(const ordered_json& j) {
  ScoredResponse r;
  r.raw_text = j.at("raw_text").get<std::string>();
  r.reasoning = j.at("reasoning").get<std::string>();
  r.answer = j.at("answer").get<std::string>();
  r.answer_raw = j.at("answer_raw").get<std::string>();
  r.mode = mode_from_string(j.at("mode").get<std::string>());
  r.parse_status = parse_status_from_string(j.at("parse_status").get<std::string>());
  if (j.contains("score_percent")) r.score_percent = j.at("score_percent").get<double>();
  return r;
}

}  // namespace

IterationTrace run_multi_turn(const QARecord& record, ElicitationMode mode, int turns,
                              Gateway& gateway, const ModelConfig& config,
                              const PromptLibrary& prompts) {
  if (turns < 0) throw std::invalid_argument("turns must be >= 0");
  IterationTrace trace;
  trace.record_id = record.id;
  trace.mode = mode;
  std::vector<std::string> history;
  for (int t = 0; t <= turns; ++t) {
    const std::string prompt = t == 0 ? prompts.render_vanilla(record, mode)
                                      : prompts.render_self_critique(record, mode, history);
    CompletionResult result;
    try {
      result = gateway.complete(prompt, config);
    } catch (const std::exception&) {
      trace.complete = false;
      break;
    }
    ScoredResponse parsed = parse_scored_answer(result.raw_text, mode, record.question_type);
    TraceEntry entry;
    entry.iteration = t;
    entry.correct = judge_correct(parsed, record, &entry.unresolved);
    entry.response = std::move(parsed);
    trace.entries.push_back(std::move(entry));
    history.push_back(result.raw_text);
  }
  return trace;
}

std::vector<IterationTrace> run_cohort(const std::vector<QARecord>& records, ElicitationMode mode,
                                       int turns, Gateway& gateway, const ModelConfig& config,
                                       const PromptLibrary& prompts, int parallelism) {
  if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
  std::vector<IterationTrace> traces(records.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= records.size()) return;
      traces[i] = run_multi_turn(records[i], mode, turns, gateway, config, prompts);
    }
  };
  std::size_t workers = std::min<std::size_t>(parallelism, records.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return traces;
}

void write_traces(const std::filesystem::path& path, const std::vector<IterationTrace>& traces,
                  const std::string& config_hash) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write traces to " + path.string());
  for (const auto& trace : traces) {
    ordered_json j = {
        {"record_id", trace.record_id},
        {"mode", to_string(trace.mode)},
        {"complete", trace.complete},
    };
    if (!config_hash.empty()) j["config_hash"] = config_hash;
    ordered_json entries = ordered_json::array();
    for (const auto& entry : trace.entries) {
      entries.push_back({
          {"iteration", entry.iteration},
          {"correct", entry.correct},
          {"unresolved", entry.unresolved},
          {"response", response_to_json(entry.response)},
      });
    }
    j["entries"] = std::move(entries);
    out << j.dump() << '\n';
  }
}

std::vector<IterationTrace> read_traces(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read traces from " + path.string());
  std::vector<IterationTrace> traces;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line);
    IterationTrace trace;
    trace.record_id = j.at("record_id").get<std::string>();
    trace.mode = mode_from_string(j.at("mode").get<std::string>());
    trace.complete = j.at("complete").get<bool>();
    for (const auto& e : j.at("entries")) {
      TraceEntry entry;
      entry.iteration = e.at("iteration").get<int>();
      entry.correct = e.at("correct").get<bool>();
      entry.unresolved = e.at("unresolved").get<bool>();
      entry.response = response_from_json(e.at("response"));
      trace.entries.push_back(std::move(entry));
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

}  // namespace vcalib
