#include "vcalib/parser.hpp"

#include <cctype>
#include <optional>
#include <regex>
#include <stdexcept>

#include "vcalib/dataset.hpp"
#include "vcalib/text.hpp"

namespace vcalib {

namespace {

constexpr const char* kThinkToken = "</think>";

// Answer slot is lazy so it extends past internal commas only until the
// ", and the <keyword> is" delimiter can match.
const std::regex kScoreSentence(
    R"(the\s+(refined\s+)?answer\s+is\b[ \t]*:?[ \t]*([^\n]*?)[ \t]*,\s*and\s+the\s+(confidence|uncertainty)\s+is\b\s*[*_`]*\s*([+-]?[0-9]+(?:\.[0-9]+)?)\s*[*_`]*\s*(?:%|percent)?)",
    std::regex::icase);

const std::regex kAnswerOnly(R"(the\s+(refined\s+)?answer\s+is\b[ \t]*:?[ \t]*([^\n]+))",
                             std::regex::icase);

bool is_emphasis(char c) { return c == '*' || c == '_' || c == '`'; }

// Peels symmetric markdown emphasis wrappers: **x** -> x, `x` -> x.
std::string strip_emphasis(std::string s) {
  s = trim(s);
  while (s.size() >= 2 && is_emphasis(s.front()) && s.front() == s.back()) {
    s = trim(s.substr(1, s.size() - 2));
  }
  return s;
}

std::string strip_trailing_punct(std::string s) {
  static const std::string punct = ".,;:!?";
  while (!s.empty() && punct.find(s.back()) != std::string::npos) s.pop_back();
  return trim(s);
}

std::optional<std::smatch> last_match(const std::string& text, const std::regex& re) {
  std::optional<std::smatch> last;
  auto begin = std::sregex_iterator(text.begin(), text.end(), re);
  for (auto it = begin; it != std::sregex_iterator(); ++it) last = *it;
  return last;
}

std::optional<std::size_t> choice_index(const std::string& normalized, const QARecord& record) {
  if (normalized.empty()) return std::nullopt;
  const std::size_t n = record.choices.size();
  auto label_index = [&](char c) -> std::optional<std::size_t> {
    if (!std::isalpha(static_cast<unsigned char>(c))) return std::nullopt;
    std::size_t idx = static_cast<std::size_t>(std::tolower(static_cast<unsigned char>(c)) - 'a');
    if (idx < n) return idx;
    return std::nullopt;
  };
  if (normalized.size() == 1) return label_index(normalized[0]);
  // "b) text" / "b. text" / "b: text" forms: the label governs.
  if (normalized.size() >= 2 &&
      (normalized[1] == ')' || normalized[1] == '.' || normalized[1] == ':')) {
    if (auto idx = label_index(normalized[0])) return idx;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (normalize_answer(record.choices[i], QuestionType::multiple_choice).text == normalized)
      return i;
  }
  return std::nullopt;
}

}  // namespace

std::pair<std::string, std::string> split_reasoning(const std::string& raw) {
  std::size_t pos = raw.rfind(kThinkToken);
  if (pos == std::string::npos) return {"", raw};
  return {raw.substr(0, pos), raw.substr(pos + std::string(kThinkToken).size())};
}

ScoredResponse parse_scored_answer(const std::string& raw, ElicitationMode mode,
                                   QuestionType question_type) {
  ScoredResponse out;
  out.raw_text = raw;
  out.mode = mode;
  auto [reasoning, segment] = split_reasoning(raw);
  out.reasoning = reasoning;

  if (auto m = last_match(segment, kScoreSentence)) {
    out.answer_raw = strip_emphasis((*m)[2].str());
    out.answer = normalize_answer(out.answer_raw, question_type).text;
    out.mode = mode_from_string(lowercase((*m)[3].str()));
    double score = std::stod((*m)[4].str());
    if (score < 0.0) {
      out.score_percent = 0.0;
      out.parse_status = ParseStatus::clamped;
    } else if (score > 100.0) {
      out.score_percent = 100.0;
      out.parse_status = ParseStatus::clamped;
    } else {
      out.score_percent = score;
      out.parse_status = ParseStatus::ok;
    }
    return out;
  }

  if (auto m = last_match(segment, kAnswerOnly)) {
    std::string slot = (*m)[2].str();
    // A score phrase whose number failed to parse still delimits the answer.
    for (const char* delim : {", and the confidence is", ", and the uncertainty is"}) {
      std::size_t pos = ifind(slot, delim);
      if (pos != std::string::npos) slot = slot.substr(0, pos);
    }
    out.answer_raw = strip_emphasis(strip_trailing_punct(trim(slot)));
    out.answer = normalize_answer(out.answer_raw, question_type).text;
    out.parse_status = ParseStatus::answer_only;
    return out;
  }

  out.parse_status = ParseStatus::failed;
  return out;
}

std::string rewrite_score_percent(const std::string& raw, int new_percent) {
  std::optional<std::smatch> m = last_match(raw, kScoreSentence);
  if (!m) throw std::invalid_argument("no score sentence to rewrite");
  std::size_t pos = static_cast<std::size_t>(m->position(4));
  std::size_t len = static_cast<std::size_t>(m->length(4));
  std::string out = raw;
  out.replace(pos, len, std::to_string(new_percent));
  return out;
}

bool judge_correct(const ScoredResponse& response, const QARecord& record, bool* unresolved) {
  if (unresolved) *unresolved = false;
  if (response.parse_status == ParseStatus::failed) return false;

  switch (record.question_type) {
    case QuestionType::yes_no: {
      NormalizedAnswer norm = normalize_answer(response.answer_raw, QuestionType::yes_no);
      if (norm.unresolved) {
        if (unresolved) *unresolved = true;
        return false;
      }
      return norm.text == lowercase(trim(record.gold_answer));
    }
    case QuestionType::multiple_choice: {
      std::string ans = normalize_answer(response.answer_raw, QuestionType::multiple_choice).text;
      std::string gold = normalize_answer(record.gold_answer, QuestionType::multiple_choice).text;
      auto ans_idx = choice_index(ans, record);
      auto gold_idx = choice_index(gold, record);
      if (ans_idx && gold_idx) return *ans_idx == *gold_idx;
      return ans == gold;
    }
    case QuestionType::open_ended:
    case QuestionType::math: {
      return normalize_answer(response.answer_raw, record.question_type).text ==
             normalize_answer(record.gold_answer, record.question_type).text;
    }
  }
  return false;
}

}  // namespace vcalib
