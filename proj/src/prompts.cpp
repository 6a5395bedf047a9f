#include "vcalib/prompts.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vcalib {

namespace {

struct TemplateAsset {
  const char* name;
  const char* body;
};

const TemplateAsset kBuiltinTemplates[] = {
#include "template_assets.inc"
};

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size()))
    ++count;
  return count;
}

std::string replace_once(std::string body, const std::string& placeholder,
                         const std::string& value) {
  std::size_t pos = body.find(placeholder);
  if (pos == std::string::npos)
    throw std::logic_error("template is missing placeholder " + placeholder);
  body.replace(pos, placeholder.size(), value);
  return body;
}

std::string rstrip_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

std::vector<std::string> required_for(const std::string& name) {
  const bool with_options = name.find("multiple_choice") != std::string::npos;
  if (name.rfind("vanilla_", 0) == 0) {
    std::vector<std::string> req = {"[Question]"};
    if (with_options) req.push_back("[Options]");
    return req;
  }
  if (name.rfind("self_critique_", 0) == 0) {
    std::vector<std::string> req = {"[Question]", "[Initial_Responses]", "[Refined_Responses]"};
    if (with_options) req.push_back("[Options]");
    return req;
  }
  if (name == "critique_generation")
    return {"[Question]", "[Correct_Answer]", "[Facts]", "[Student's_Response]"};
  return {};
}

}  // namespace

std::string format_options(const std::vector<std::string>& choices) {
  std::ostringstream os;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    if (i) os << '\n';
    os << static_cast<char>('A' + i) << ". " << choices[i];
  }
  return os.str();
}

void PromptLibrary::add(PromptTemplate tpl) {
  tpl.body = rstrip_newlines(tpl.body);
  for (const std::string& placeholder : tpl.required_placeholders) {
    if (count_occurrences(tpl.body, placeholder) != 1)
      throw std::runtime_error("template '" + tpl.name + "' must contain " + placeholder +
                               " exactly once");
  }
  templates_[tpl.name] = std::move(tpl);
}

PromptLibrary PromptLibrary::builtin() {
  PromptLibrary lib;
  for (const TemplateAsset& asset : kBuiltinTemplates)
    lib.add({asset.name, asset.body, required_for(asset.name)});
  return lib;
}

PromptLibrary PromptLibrary::load_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("template directory does not exist: " + dir.string());
  PromptLibrary lib = builtin();
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    std::ostringstream os;
    os << in.rdbuf();
    std::string name = entry.path().stem().string();
    lib.add({name, os.str(), required_for(name)});
  }
  return lib;
}

const PromptTemplate& PromptLibrary::get(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw std::out_of_range("unknown prompt template: " + name);
  return it->second;
}

std::vector<std::string> PromptLibrary::names() const {
  std::vector<std::string> out;
  out.reserve(templates_.size());
  for (const auto& [name, tpl] : templates_) out.push_back(name);
  return out;
}

std::string PromptLibrary::render_vanilla(const QARecord& record, ElicitationMode mode) const {
  validate(record);
  const std::string name =
      std::string("vanilla_") + to_string(record.question_type) + "_" + to_string(mode);
  std::string body = replace_once(get(name).body, "[Question]", record.question);
  if (record.question_type == QuestionType::multiple_choice)
    body = replace_once(body, "[Options]", format_options(record.choices));
  return body;
}

std::string PromptLibrary::render_self_critique(const QARecord& record, ElicitationMode mode,
                                                const std::vector<std::string>& history) const {
  validate(record);
  if (history.empty())
    throw std::invalid_argument("self-critique rendering needs at least the initial response");
  const std::string name =
      std::string("self_critique_") + to_string(record.question_type) + "_" + to_string(mode);
  std::string refined;
  if (history.size() == 1) {
    refined = "none yet";
  } else {
    std::ostringstream os;
    for (std::size_t i = 1; i < history.size(); ++i) {
      if (i > 1) os << "\n\n";
      os << i << ". " << history[i];
    }
    refined = os.str();
  }
  std::string body = replace_once(get(name).body, "[Question]", record.question);
  if (record.question_type == QuestionType::multiple_choice)
    body = replace_once(body, "[Options]", format_options(record.choices));
  body = replace_once(body, "[Initial_Responses]", history[0]);
  body = replace_once(body, "[Refined_Responses]", refined);
  return body;
}

std::string PromptLibrary::render_critique_generation(const QARecord& record,
                                                      const std::string& student_response,
                                                      bool think_structured) const {
  validate(record);
  if (student_response.empty()) throw std::invalid_argument("student response must be non-empty");
  std::string body = get("critique_generation").body;
  body = replace_once(body, "[Question]", record.question);
  body = replace_once(body, "[Correct_Answer]", record.gold_answer);
  body = replace_once(body, "[Facts]",
                      record.reference_solution ? *record.reference_solution : "not provided");
  body = replace_once(body, "[Student's_Response]", student_response);
  if (think_structured) body += "\n\n" + get("critique_think_structured").body;
  return body;
}

const std::string& PromptLibrary::critique_instruction() const {
  return get("critique_instruction").body;
}

}  // namespace vcalib
