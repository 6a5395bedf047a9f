#include "vcalib/types.hpp"

namespace vcalib {

const char* to_string(QuestionType t) {
  switch (t) {
    case QuestionType::open_ended: return "open_ended";
    case QuestionType::multiple_choice: return "multiple_choice";
    case QuestionType::yes_no: return "yes_no";
    case QuestionType::math: return "math";
  }
  return "open_ended";
}

const char* to_string(ElicitationMode m) {
  return m == ElicitationMode::uncertainty ? "uncertainty" : "confidence";
}

const char* to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::ok: return "ok";
    case ParseStatus::clamped: return "clamped";
    case ParseStatus::answer_only: return "answer_only";
    case ParseStatus::failed: return "failed";
  }
  return "failed";
}

QuestionType question_type_from_string(const std::string& s) {
  if (s == "open_ended") return QuestionType::open_ended;
  if (s == "multiple_choice") return QuestionType::multiple_choice;
  if (s == "yes_no") return QuestionType::yes_no;
  if (s == "math") return QuestionType::math;
  throw std::invalid_argument("unknown question type: " + s);
}

ElicitationMode mode_from_string(const std::string& s) {
  if (s == "uncertainty") return ElicitationMode::uncertainty;
  if (s == "confidence") return ElicitationMode::confidence;
  throw std::invalid_argument("unknown elicitation mode: " + s);
}

ParseStatus parse_status_from_string(const std::string& s) {
  if (s == "ok") return ParseStatus::ok;
  if (s == "clamped") return ParseStatus::clamped;
  if (s == "answer_only") return ParseStatus::answer_only;
  if (s == "failed") return ParseStatus::failed;
  throw std::invalid_argument("unknown parse status: " + s);
}

namespace {

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

void validate(const QARecord& record) {
  if (record.id.empty()) throw std::invalid_argument("record id is empty");
  if (record.question.empty())
    throw std::invalid_argument("record " + record.id + ": question is empty");
  if (record.gold_answer.empty())
    throw std::invalid_argument("record " + record.id + ": gold answer is empty");

  const bool has_choices = !record.choices.empty();
  if (record.question_type == QuestionType::multiple_choice) {
    if (record.choices.size() < 2)
      throw std::invalid_argument("record " + record.id +
                                  ": multiple_choice needs at least 2 choices");
    if (record.choices.size() > 26)
      throw std::invalid_argument("record " + record.id +
                                  ": more than 26 choices is unsupported");
    for (const auto& c : record.choices)
      if (c.empty())
        throw std::invalid_argument("record " + record.id + ": empty choice entry");
  } else if (has_choices) {
    throw std::invalid_argument("record " + record.id +
                                ": choices present on non-multiple_choice record");
  }

  if (record.question_type == QuestionType::yes_no) {
    const std::string g = lowercase(record.gold_answer);
    if (g != "yes" && g != "no")
      throw std::invalid_argument("record " + record.id +
                                  ": yes_no gold answer must be yes or no, got '" +
                                  record.gold_answer + "'");
  }
}

}  // namespace vcalib
