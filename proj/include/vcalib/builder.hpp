#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vcalib/gateway.hpp"
#include "vcalib/prompts.hpp"
#include "vcalib/types.hpp"

namespace vcalib {

enum class CritiqueJudgment { appropriate, too_high, too_low, unparsed };
const char* to_string(CritiqueJudgment j);
CritiqueJudgment critique_judgment_from_string(const std::string& s);

// Last word-bounded "appropriate" / "too high" / "too low" in the
// post-"</think>" segment (whole text when unstructured); none -> unparsed.
CritiqueJudgment extract_judgment(const std::string& critique_text);

// A teacher (or self) critique of one student response. think_structured is
// content-derived: set only when structuring was requested and the critique
// contains exactly one "</think>" separator.
struct CritiqueRecord {
  std::string record_id;
  ScoredResponse student_response;
  std::string teacher_critique;
  CritiqueJudgment judgment = CritiqueJudgment::unparsed;
  bool think_structured = false;
};

CritiqueRecord make_critique_record(const QARecord& record, const ScoredResponse& student,
                                    std::string critique_text, bool think_requested);

// Renders the critique-generation prompt and calls the given model.
CritiqueRecord generate_teacher_critique(const QARecord& record, const ScoredResponse& student,
                                         Gateway& gateway, const ModelConfig& config,
                                         const PromptLibrary& prompts, bool think_structured);

enum class TrainingVariant { critical_sft, sft_hard, sft_soft, dpo };
const char* to_string(TrainingVariant v);
TrainingVariant training_variant_from_string(const std::string& s);

struct TrainingExample {
  TrainingVariant variant = TrainingVariant::critical_sft;
  std::string instruction;
  std::string input;
  std::string output;    // SFT variants only
  std::string chosen;    // dpo only
  std::string rejected;  // dpo only
  std::string record_id;
  std::string benchmark;
  ElicitationMode mode = ElicitationMode::confidence;
};

// The (instruction, input) pair shared byte-for-byte by critical_sft and dpo
// examples of the same record: the fixed critique instruction plus the
// question, the student's raw response, and its verbalized score.
std::pair<std::string, std::string> critique_example_io(const QARecord& record,
                                                        const ScoredResponse& student,
                                                        const PromptLibrary& prompts);

TrainingExample build_critical_sft(const QARecord& record, const ScoredResponse& student,
                                   const CritiqueRecord& critique, const PromptLibrary& prompts);

// Gold-aligned score rewrite: confidence 100/0 by correctness, inverted for
// uncertainty mode (the mode comes from the student response).
TrainingExample build_hard_label(const QARecord& record, const ScoredResponse& student,
                                 bool correct, const PromptLibrary& prompts);

// As hard labels with the smoother 80/20 mapping.
TrainingExample build_soft_label(const QARecord& record, const ScoredResponse& student,
                                 bool correct, const PromptLibrary& prompts);

// chosen = teacher critique, rejected = the student's own critique of the
// same response. nullopt (skip) when the rejected text is missing or the
// pair is degenerate (chosen == rejected).
std::optional<TrainingExample> build_dpo_pair(const QARecord& record,
                                              const ScoredResponse& student,
                                              const CritiqueRecord& teacher_critique,
                                              const std::string& self_critique_text,
                                              const PromptLibrary& prompts);

// Trainer-facing JSONL line: {"instruction","input","output"|"chosen"+
// "rejected","meta":{...}}.
std::string to_jsonl_line(const TrainingExample& example, const std::string& config_hash = "");

}  // namespace vcalib
