#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcalib {

enum class QuestionType { open_ended, multiple_choice, yes_no, math };

// What the score attaches to: the question as a whole (uncertainty) or the
// produced answer (confidence). The inverse mapping between the two lives in
// metrics::to_calibration_point.
enum class ElicitationMode { uncertainty, confidence };

enum class ParseStatus { ok, clamped, answer_only, failed };

const char* to_string(QuestionType t);
const char* to_string(ElicitationMode m);
const char* to_string(ParseStatus s);

QuestionType question_type_from_string(const std::string& s);
ElicitationMode mode_from_string(const std::string& s);
ParseStatus parse_status_from_string(const std::string& s);

// One benchmark question in canonical form.
struct QARecord {
  std::string id;
  std::string question;
  QuestionType question_type = QuestionType::open_ended;
  std::vector<std::string> choices;  // multiple_choice only, >= 2 entries
  std::string gold_answer;
  std::optional<std::string> reference_solution;
  std::string source_benchmark;
};

// Throws std::invalid_argument when a record violates its invariants
// (empty gold answer, choices/type mismatch, yes/no gold not yes|no, ...).
void validate(const QARecord& record);

// A parsed model reply. `answer` is the normalized answer slot, `answer_raw`
// the slot as the model wrote it. `score_percent` is absent for
// answer_only/failed parses.
struct ScoredResponse {
  std::string raw_text;
  std::string reasoning;  // text before the last "</think>", empty if none
  std::string answer;
  std::string answer_raw;
  std::optional<double> score_percent;  // within [0,100] when present
  ElicitationMode mode = ElicitationMode::confidence;
  ParseStatus parse_status = ParseStatus::failed;
};

struct CalibrationPoint {
  double confidence = 0.0;  // [0,1]
  bool correct = false;
};

// One multi-turn self-critique entry: the parsed response at `iteration`
// plus its correctness verdict.
struct TraceEntry {
  int iteration = 0;
  ScoredResponse response;
  bool correct = false;
  bool unresolved = false;  // yes/no answer that mapped to neither token
};

// Full multi-turn history for one record in one elicitation mode.
// entries[0] is the vanilla response; entries[t>0] the self-critique rounds.
// `complete` is false when a transport failure truncated the run.
struct IterationTrace {
  std::string record_id;
  ElicitationMode mode = ElicitationMode::confidence;
  bool complete = true;
  std::vector<TraceEntry> entries;
};

}  // namespace vcalib
