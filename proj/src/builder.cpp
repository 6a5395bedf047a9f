#include "vcalib/builder.hpp"

#include <cctype>
#include <stdexcept>

#include "json.hpp"
#include "vcalib/hash.hpp"
#include "vcalib/parser.hpp"
#include "vcalib/text.hpp"

namespace vcalib {

namespace {

using ordered_json = nlohmann::ordered_json;

bool scored(const ScoredResponse& r) {
  return (r.parse_status == ParseStatus::ok || r.parse_status == ParseStatus::clamped) &&
         r.score_percent.has_value();
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size()))
    ++count;
  return count;
}

bool word_bounded(const std::string& text, std::size_t pos, std::size_t len) {
  auto alpha = [&](std::size_t i) {
    return std::isalpha(static_cast<unsigned char>(text[i])) != 0;
  };
  if (pos > 0 && alpha(pos - 1)) return false;
  if (pos + len < text.size() && alpha(pos + len)) return false;
  return true;
}

int hard_target(bool correct, ElicitationMode mode) {
  const int confidence_score = correct ? 100 : 0;
  return mode == ElicitationMode::confidence ? confidence_score : 100 - confidence_score;
}

int soft_target(bool correct, ElicitationMode mode) {
  const int confidence_score = correct ? 80 : 20;
  return mode == ElicitationMode::confidence ? confidence_score : 100 - confidence_score;
}

TrainingExample rewritten_label(const QARecord& record, const ScoredResponse& student,
                                int target, TrainingVariant variant,
                                const PromptLibrary& prompts) {
  if (!scored(student))
    throw std::invalid_argument("cannot build labels from an unscored student response");
  TrainingExample ex;
  ex.variant = variant;
  ex.instruction = prompts.render_vanilla(record, student.mode);
  ex.input = "";
  ex.output = rewrite_score_percent(student.raw_text, target);
  ex.record_id = record.id;
  ex.benchmark = record.source_benchmark;
  ex.mode = student.mode;
  return ex;
}

}  // namespace

const char* to_string(CritiqueJudgment j) {
  switch (j) {
    case CritiqueJudgment::appropriate: return "appropriate";
    case CritiqueJudgment::too_high: return "too_high";
    case CritiqueJudgment::too_low: return "too_low";
    case CritiqueJudgment::unparsed: return "unparsed";
  }
  return "?";
}

CritiqueJudgment critique_judgment_from_string(const std::string& s) {
  if (s == "appropriate") return CritiqueJudgment::appropriate;
  if (s == "too_high") return CritiqueJudgment::too_high;
  if (s == "too_low") return CritiqueJudgment::too_low;
  if (s == "unparsed") return CritiqueJudgment::unparsed;
  throw std::invalid_argument("unknown critique judgment: " + s);
}

CritiqueJudgment extract_judgment(const std::string& critique_text) {
  std::string segment = critique_text;
  std::size_t think = segment.rfind("</think>");
  if (think != std::string::npos) segment = segment.substr(think + 8);
  segment = lowercase(segment);

  struct Needle {
    const char* text;
    CritiqueJudgment judgment;
  };
  static const Needle needles[] = {
      {"appropriate", CritiqueJudgment::appropriate},
      {"too high", CritiqueJudgment::too_high},
      {"too low", CritiqueJudgment::too_low},
  };
  CritiqueJudgment result = CritiqueJudgment::unparsed;
  std::size_t best = std::string::npos;
  for (const auto& needle : needles) {
    const std::string token = needle.text;
    for (std::size_t pos = segment.find(token); pos != std::string::npos;
         pos = segment.find(token, pos + 1)) {
      if (!word_bounded(segment, pos, token.size())) continue;
      if (best == std::string::npos || pos > best) {
        best = pos;
        result = needle.judgment;
      }
    }
  }
  return result;
}

CritiqueRecord make_critique_record(const QARecord& record, const ScoredResponse& student,
                                    std::string critique_text, bool think_requested) {
  if (critique_text.empty()) throw std::invalid_argument("critique text must be non-empty");
  CritiqueRecord out;
  out.record_id = record.id;
  out.student_response = student;
  out.judgment = extract_judgment(critique_text);
  out.think_structured = think_requested && count_occurrences(critique_text, "</think>") == 1;
  out.teacher_critique = std::move(critique_text);
  return out;
}

CritiqueRecord generate_teacher_critique(const QARecord& record, const ScoredResponse& student,
                                         Gateway& gateway, const ModelConfig& config,
                                         const PromptLibrary& prompts, bool think_structured) {
  if (!scored(student))
    throw std::invalid_argument("cannot critique an unscored student response");
  const std::string prompt =
      prompts.render_critique_generation(record, student.raw_text, think_structured);
  CompletionResult result = gateway.complete(prompt, config);
  return make_critique_record(record, student, result.raw_text, think_structured);
}

const char* to_string(TrainingVariant v) {
  switch (v) {
    case TrainingVariant::critical_sft: return "critical_sft";
    case TrainingVariant::sft_hard: return "sft_hard";
    case TrainingVariant::sft_soft: return "sft_soft";
    case TrainingVariant::dpo: return "dpo";
  }
  return "?";
}

TrainingVariant training_variant_from_string(const std::string& s) {
  if (s == "critical_sft") return TrainingVariant::critical_sft;
  if (s == "sft_hard") return TrainingVariant::sft_hard;
  if (s == "sft_soft") return TrainingVariant::sft_soft;
  if (s == "dpo") return TrainingVariant::dpo;
  throw std::invalid_argument("unknown training variant: " + s);
}

std::pair<std::string, std::string> critique_example_io(const QARecord& record,
                                                        const ScoredResponse& student,
                                                        const PromptLibrary& prompts) {
  if (!scored(student))
    throw std::invalid_argument("cannot build a critique example from an unscored response");
  std::string score_label =
      student.mode == ElicitationMode::confidence ? "Stated confidence: " : "Stated uncertainty: ";
  std::string input = "Question: " + record.question + "\n\nStudent's Response: " +
                      student.raw_text + "\n\n" + score_label +
                      format_double(*student.score_percent) + "%";
  return {prompts.critique_instruction(), std::move(input)};
}

TrainingExample build_critical_sft(const QARecord& record, const ScoredResponse& student,
                                   const CritiqueRecord& critique, const PromptLibrary& prompts) {
  if (critique.teacher_critique.empty())
    throw std::invalid_argument("critique text must be non-empty");
  TrainingExample ex;
  ex.variant = TrainingVariant::critical_sft;
  std::tie(ex.instruction, ex.input) = critique_example_io(record, student, prompts);
  ex.output = critique.teacher_critique;
  ex.record_id = record.id;
  ex.benchmark = record.source_benchmark;
  ex.mode = student.mode;
  return ex;
}

TrainingExample build_hard_label(const QARecord& record, const ScoredResponse& student,
                                 bool correct, const PromptLibrary& prompts) {
  return rewritten_label(record, student, hard_target(correct, student.mode),
                         TrainingVariant::sft_hard, prompts);
}

TrainingExample build_soft_label(const QARecord& record, const ScoredResponse& student,
                                 bool correct, const PromptLibrary& prompts) {
  return rewritten_label(record, student, soft_target(correct, student.mode),
                         TrainingVariant::sft_soft, prompts);
}

std::optional<TrainingExample> build_dpo_pair(const QARecord& record,
                                              const ScoredResponse& student,
                                              const CritiqueRecord& teacher_critique,
                                              const std::string& self_critique_text,
                                              const PromptLibrary& prompts) {
  if (teacher_critique.teacher_critique.empty())
    throw std::invalid_argument("teacher critique must be non-empty");
  if (self_critique_text.empty()) return std::nullopt;
  if (self_critique_text == teacher_critique.teacher_critique) return std::nullopt;
  TrainingExample ex;
  ex.variant = TrainingVariant::dpo;
  std::tie(ex.instruction, ex.input) = critique_example_io(record, student, prompts);
  ex.chosen = teacher_critique.teacher_critique;
  ex.rejected = self_critique_text;
  ex.record_id = record.id;
  ex.benchmark = record.source_benchmark;
  ex.mode = student.mode;
  return ex;
}

std::string to_jsonl_line(const TrainingExample& example, const std::string& config_hash) {
  ordered_json j;
  j["instruction"] = example.instruction;
  j["input"] = example.input;
  if (example.variant == TrainingVariant::dpo) {
    j["chosen"] = example.chosen;
    j["rejected"] = example.rejected;
  } else {
    j["output"] = example.output;
  }
  ordered_json meta = {
      {"record_id", example.record_id},
      {"benchmark", example.benchmark},
      {"mode", to_string(example.mode)},
      {"variant", to_string(example.variant)},
  };
  if (!config_hash.empty()) meta["config_hash"] = config_hash;
  j["meta"] = std::move(meta);
  return j.dump();
}

}  // namespace vcalib
