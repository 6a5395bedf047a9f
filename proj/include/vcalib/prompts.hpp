#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vcalib/types.hpp"

namespace vcalib {

// A text template with [Placeholder] slots. Every required placeholder must
// occur exactly once in the body (checked at load time).
struct PromptTemplate {
  std::string name;
  std::string body;
  std::vector<std::string> required_placeholders;
};

// "A. <choice>" lines, one per option, labels A..Z.
std::string format_options(const std::vector<std::string>& choices);

// Renders the four prompt families (vanilla elicitation, multi-turn
// self-critique, teacher critique generation, plus the fixed critique-task
// instruction) keyed by (family, question_type, mode).
class PromptLibrary {
 public:
  // Templates compiled in from the asset files.
  static PromptLibrary builtin();
  // Builtin set overlaid with any <name>.txt files found in dir.
  static PromptLibrary load_dir(const std::filesystem::path& dir);

  const PromptTemplate& get(const std::string& name) const;
  std::vector<std::string> names() const;

  std::string render_vanilla(const QARecord& record, ElicitationMode mode) const;

  // history[0] is the initial raw response, history[1..] the refined ones,
  // all embedded verbatim and in order. Empty history is an error.
  std::string render_self_critique(const QARecord& record, ElicitationMode mode,
                                   const std::vector<std::string>& history) const;

  // think_structured appends the "</think>"-separator instruction used for
  // reasoning-model students.
  std::string render_critique_generation(const QARecord& record,
                                         const std::string& student_response,
                                         bool think_structured) const;

  // Fixed instruction string emitted on critique-style training examples.
  const std::string& critique_instruction() const;

 private:
  void add(PromptTemplate tpl);

  std::map<std::string, PromptTemplate> templates_;
};

}  // namespace vcalib
