#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vcalib/types.hpp"

namespace vcalib {

// Maps one benchmark's JSONL field names onto QARecord fields. Benchmarks
// ship heterogeneous schemas, so every loaded file is paired with a profile.
struct FieldProfile {
  std::string name;
  std::string id_field = "id";
  std::string question_field = "question";
  std::string gold_answer_field = "answer";
  std::string reference_solution_field;  // empty = benchmark has none
  std::string choices_field;             // required for multiple_choice
  QuestionType question_type = QuestionType::open_ended;
};

struct IngestError {
  std::size_t line = 0;  // 1-based line number in the source file
  std::string message;
};

struct LoadResult {
  std::vector<QARecord> records;  // load order preserved
  std::vector<IngestError> errors;
  std::size_t line_count = 0;  // non-blank lines seen
};

// Dataset-level failures: unreadable file, duplicate ids.
class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads a JSONL benchmark. Every non-blank line becomes either a record or
// a line-level error; |records| + |errors| equals line_count.
LoadResult load_dataset(const std::filesystem::path& path, const FieldProfile& profile);

// Uniform sample of n records without replacement, deterministic in
// (records, n, seed). Throws std::invalid_argument when n exceeds the pool.
std::vector<QARecord> sample_training_questions(const std::vector<QARecord>& records,
                                                std::size_t n, std::uint64_t seed);

struct NormalizedAnswer {
  std::string text;
  bool unresolved = false;  // yes_no input with neither an affirmation nor a negation
};

// Exact-match normalization. open_ended: lowercase, trim, terminal
// punctuation and leading articles stripped. math: surrounding math
// delimiters stripped, symbols otherwise untouched. yes_no: mapped to
// "yes"/"no" by the first affirmation/negation token.
NormalizedAnswer normalize_answer(const std::string& raw, QuestionType type);

}  // namespace vcalib
