#include "vcalib/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vcalib/text.hpp"

namespace vcalib {

namespace {

using nlohmann::json;

std::string strip_terminal_punct(std::string s) {
  static const std::string punct = ".,;:!?";
  while (!s.empty() && punct.find(s.back()) != std::string::npos) s.pop_back();
  return trim(s);
}

std::string strip_leading_articles(std::string s) {
  for (;;) {
    bool stripped = false;
    for (const char* art : {"a ", "an ", "the "}) {
      std::size_t len = std::string(art).size();
      if (s.size() > len && s.compare(0, len, art) == 0) {
        s = trim(s.substr(len));
        stripped = true;
        break;
      }
    }
    if (!stripped) return s;
  }
}

std::string strip_math_delimiters(std::string s) {
  struct Pair {
    const char* open;
    const char* close;
  };
  static const Pair pairs[] = {{"\\(", "\\)"}, {"\\[", "\\]"}, {"$$", "$$"}, {"$", "$"}};
  for (;;) {
    s = trim(s);
    bool stripped = false;
    for (const auto& p : pairs) {
      const std::string open = p.open;
      const std::string close = p.close;
      if (s.size() > open.size() + close.size() - 1 && s.compare(0, open.size(), open) == 0 &&
          s.compare(s.size() - close.size(), close.size(), close) == 0) {
        s = s.substr(open.size(), s.size() - open.size() - close.size());
        stripped = true;
        break;
      }
    }
    if (!stripped) return s;
  }
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string> word_tokens(const std::string& s) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : s) {
    if (is_word_char(c)) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

// First affirmation/negation token decides; neither present -> unresolved.
const std::set<std::string> kAffirmations = {"yes", "yeah", "yep", "yup",
                                             "true", "correct", "affirmative"};
const std::set<std::string> kNegations = {"no", "nope", "false", "incorrect", "negative", "not"};

std::string require_string(const json& obj, const std::string& field) {
  if (!obj.contains(field)) throw std::runtime_error("missing field '" + field + "'");
  const json& v = obj.at(field);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_float()) {
    std::ostringstream os;
    os << v.get<double>();
    return os.str();
  }
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  throw std::runtime_error("field '" + field + "' is not a string");
}

QARecord record_from_line(const json& obj, const FieldProfile& profile) {
  QARecord rec;
  rec.id = require_string(obj, profile.id_field);
  rec.question = require_string(obj, profile.question_field);
  rec.gold_answer = require_string(obj, profile.gold_answer_field);
  rec.question_type = profile.question_type;
  rec.source_benchmark = profile.name;
  if (!profile.reference_solution_field.empty() && obj.contains(profile.reference_solution_field)) {
    const json& v = obj.at(profile.reference_solution_field);
    if (!v.is_null()) rec.reference_solution = require_string(obj, profile.reference_solution_field);
  }
  if (profile.question_type == QuestionType::multiple_choice) {
    if (profile.choices_field.empty())
      throw std::runtime_error("profile '" + profile.name +
                               "' maps multiple_choice but names no choices field");
    if (!obj.contains(profile.choices_field))
      throw std::runtime_error("missing field '" + profile.choices_field + "'");
    const json& arr = obj.at(profile.choices_field);
    if (!arr.is_array()) throw std::runtime_error("field '" + profile.choices_field + "' is not an array");
    for (const auto& c : arr) {
      if (!c.is_string()) throw std::runtime_error("non-string choice entry");
      rec.choices.push_back(c.get<std::string>());
    }
  }
  if (rec.question_type == QuestionType::yes_no) rec.gold_answer = lowercase(rec.gold_answer);
  validate(rec);
  return rec;
}

// Unbiased bounded draw on top of the standard-specified mt19937_64 stream,
// so sampling is reproducible across compilers.
std::uint64_t bounded_draw(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

LoadResult load_dataset(const std::filesystem::path& path, const FieldProfile& profile) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset file: " + path.string());

  LoadResult result;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<std::size_t, std::string>> duplicates;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++result.line_count;
    try {
      json obj = json::parse(line);
      if (!obj.is_object()) throw std::runtime_error("line is not a JSON object");
      QARecord rec = record_from_line(obj, profile);
      if (!seen_ids.insert(rec.id).second) {
        duplicates.emplace_back(line_no, rec.id);
        // Counted so |records| + |errors| still matches the line count when
        // the caller catches the dataset-level failure below.
        result.errors.push_back({line_no, "duplicate id '" + rec.id + "'"});
        continue;
      }
      result.records.push_back(std::move(rec));
    } catch (const json::exception& e) {
      result.errors.push_back({line_no, std::string("malformed JSON: ") + e.what()});
    } catch (const std::exception& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  if (!duplicates.empty()) {
    std::ostringstream os;
    os << path.string() << ": duplicate record ids:";
    for (const auto& [ln, id] : duplicates) os << " '" << id << "' (line " << ln << ")";
    throw DatasetError(os.str());
  }
  return result;
}

std::vector<QARecord> sample_training_questions(const std::vector<QARecord>& records,
                                                std::size_t n, std::uint64_t seed) {
  if (n > records.size()) {
    std::ostringstream os;
    os << "cannot sample " << n << " questions from a pool of " << records.size();
    throw std::invalid_argument(os.str());
  }
  std::vector<std::size_t> index(records.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;

  std::mt19937_64 gen(seed);
  // Partial Fisher-Yates: the first n slots are a uniform draw without
  // replacement.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(bounded_draw(gen, index.size() - i));
    std::swap(index[i], index[j]);
  }
  std::vector<QARecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(records[index[i]]);
  return out;
}

NormalizedAnswer normalize_answer(const std::string& raw, QuestionType type) {
  if (type == QuestionType::math) {
    // Symbols stay untouched beyond delimiter removal, so no lowercasing.
    std::string s = strip_math_delimiters(trim(raw));
    s = strip_terminal_punct(s);
    s = strip_math_delimiters(s);
    return {collapse_whitespace(s), false};
  }

  std::string s = collapse_whitespace(strip_terminal_punct(lowercase(trim(raw))));

  if (type == QuestionType::yes_no) {
    for (const std::string& tok : word_tokens(s)) {
      if (kAffirmations.count(tok)) return {"yes", false};
      if (kNegations.count(tok)) return {"no", false};
    }
    return {s, true};
  }

  if (type == QuestionType::open_ended) s = strip_leading_articles(s);
  return {s, false};
}

}  // namespace vcalib
