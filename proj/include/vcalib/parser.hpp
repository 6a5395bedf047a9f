#pragma once

#include <string>
#include <utility>

#include "vcalib/types.hpp"

namespace vcalib {

// Splits raw text at the last "</think>" occurrence into
// (reasoning, final_segment). Without the token: ("", raw).
std::pair<std::string, std::string> split_reasoning(const std::string& raw);

// Extracts the last "The answer is X, and the {confidence|uncertainty} is N%"
// sentence (or its "The refined answer is" variant) from the final segment.
// Case-insensitive, tolerates markdown emphasis; never throws. N outside
// [0,100] is clamped (parse_status=clamped); an answer without a score yields
// answer_only; neither found yields failed. When a score sentence is found,
// the mode recorded on the response follows the keyword the model actually
// wrote, which matches `mode` whenever the model obeyed the instructions.
ScoredResponse parse_scored_answer(const std::string& raw, ElicitationMode mode,
                                   QuestionType question_type);

// Replaces the percentage of the last score sentence in `raw` with
// `new_percent`, leaving everything else byte-identical. Throws
// std::invalid_argument when no score sentence exists.
std::string rewrite_score_percent(const std::string& raw, int new_percent);

// Normalized-equality correctness judgment. multiple_choice accepts either
// the option label (A/B/...) or the option text; unresolved yes/no answers
// count incorrect and set *unresolved when given.
bool judge_correct(const ScoredResponse& response, const QARecord& record,
                   bool* unresolved = nullptr);

}  // namespace vcalib
