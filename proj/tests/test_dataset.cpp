#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>

#include "temp_dir.hpp"
#include "vcalib/dataset.hpp"

using namespace vcalib;
namespace fs = std::filesystem;

namespace {

FieldProfile yes_no_profile() {
  FieldProfile p;
  p.name = "bench";
  p.id_field = "qid";
  p.question_field = "q";
  p.gold_answer_field = "gold";
  p.reference_solution_field = "facts";
  p.question_type = QuestionType::yes_no;
  return p;
}

std::vector<QARecord> make_pool(std::size_t n) {
  std::vector<QARecord> pool;
  for (std::size_t i = 0; i < n; ++i) {
    QARecord r;
    r.id = "id" + std::to_string(i);
    r.question = "What is item " + std::to_string(i) + "?";
    r.question_type = QuestionType::open_ended;
    r.gold_answer = "thing";
    pool.push_back(r);
  }
  return pool;
}

}  // namespace

TEST_CASE("load_dataset maps fields through the profile") {
  TempDir dir("dataset");
  auto file = write_file(dir.path / "d.jsonl",
                         "{\"qid\":\"a\",\"q\":\"Is water wet?\",\"gold\":\"Yes\","
                         "\"facts\":\"water is wet\"}\n"
                         "\n"
                         "{\"qid\":\"b\",\"q\":\"Is fire cold?\",\"gold\":\"no\"}\n");
  LoadResult lr = load_dataset(file, yes_no_profile());
  REQUIRE(lr.records.size() == 2);
  CHECK(lr.errors.empty());
  CHECK(lr.line_count == 2);  // the blank line is not counted
  CHECK(lr.records[0].id == "a");
  CHECK(lr.records[0].question == "Is water wet?");
  CHECK(lr.records[0].gold_answer == "yes");  // yes/no golds are lowercased
  REQUIRE(lr.records[0].reference_solution.has_value());
  CHECK(*lr.records[0].reference_solution == "water is wet");
  CHECK(lr.records[0].source_benchmark == "bench");
  CHECK_FALSE(lr.records[1].reference_solution.has_value());
}

TEST_CASE("load_dataset coerces scalar field types to text") {
  TempDir dir("dataset");
  FieldProfile p;
  p.name = "nums";
  p.id_field = "id";
  p.question_field = "q";
  p.gold_answer_field = "gold";
  p.question_type = QuestionType::math;
  auto file = write_file(dir.path / "d.jsonl",
                         "{\"id\":7,\"q\":\"What is 3+4?\",\"gold\":7}\n");
  LoadResult lr = load_dataset(file, p);
  REQUIRE(lr.records.size() == 1);
  CHECK(lr.records[0].id == "7");
  CHECK(lr.records[0].gold_answer == "7");

  p.question_type = QuestionType::yes_no;
  auto file2 = write_file(dir.path / "b.jsonl",
                          "{\"id\":\"x\",\"q\":\"Really?\",\"gold\":true}\n");
  LoadResult lr2 = load_dataset(file2, p);
  REQUIRE(lr2.records.size() == 1);
  CHECK(lr2.records[0].gold_answer == "yes");  // boolean golds become yes/no
}

TEST_CASE("load_dataset records line-level errors without aborting") {
  TempDir dir("dataset");
  auto file = write_file(dir.path / "d.jsonl",
                         "{\"qid\":\"a\",\"q\":\"Is it so?\",\"gold\":\"yes\"}\n"
                         "this is not json\n"
                         "{\"qid\":\"c\",\"gold\":\"no\"}\n"
                         "[1,2,3]\n"
                         "{\"qid\":\"d\",\"q\":\"Is it off?\",\"gold\":\"no\"}\n");
  LoadResult lr = load_dataset(file, yes_no_profile());
  CHECK(lr.records.size() == 2);
  REQUIRE(lr.errors.size() == 3);
  CHECK(lr.line_count == 5);
  CHECK(lr.records.size() + lr.errors.size() == lr.line_count);
  CHECK(lr.errors[0].line == 2);
  CHECK(lr.errors[0].message.find("malformed JSON") != std::string::npos);
  CHECK(lr.errors[1].line == 3);
  CHECK(lr.errors[1].message.find("'q'") != std::string::npos);
  CHECK(lr.errors[2].line == 4);
}

TEST_CASE("load_dataset rejects duplicate ids naming every duplicate") {
  TempDir dir("dataset");
  auto file = write_file(dir.path / "d.jsonl",
                         "{\"qid\":\"a\",\"q\":\"One?\",\"gold\":\"yes\"}\n"
                         "{\"qid\":\"a\",\"q\":\"Two?\",\"gold\":\"no\"}\n"
                         "{\"qid\":\"b\",\"q\":\"Three?\",\"gold\":\"no\"}\n"
                         "{\"qid\":\"b\",\"q\":\"Four?\",\"gold\":\"yes\"}\n");
  try {
    load_dataset(file, yes_no_profile());
    FAIL("expected DatasetError");
  } catch (const DatasetError& e) {
    std::string msg = e.what();
    CHECK(msg.find("'a' (line 2)") != std::string::npos);
    CHECK(msg.find("'b' (line 4)") != std::string::npos);
  }
}

TEST_CASE("load_dataset throws on an unreadable file") {
  CHECK_THROWS_AS(load_dataset("/nonexistent/nowhere.jsonl", yes_no_profile()), DatasetError);
}

TEST_CASE("load_dataset reads multiple-choice options") {
  TempDir dir("dataset");
  FieldProfile p;
  p.name = "mc";
  p.id_field = "id";
  p.question_field = "q";
  p.gold_answer_field = "gold";
  p.choices_field = "options";
  p.question_type = QuestionType::multiple_choice;
  auto file = write_file(
      dir.path / "d.jsonl",
      "{\"id\":\"1\",\"q\":\"Pick one\",\"gold\":\"B\",\"options\":[\"red\",\"green\"]}\n"
      "{\"id\":\"2\",\"q\":\"No options here\",\"gold\":\"A\"}\n");
  LoadResult lr = load_dataset(file, p);
  REQUIRE(lr.records.size() == 1);
  CHECK(lr.records[0].choices == std::vector<std::string>{"red", "green"});
  REQUIRE(lr.errors.size() == 1);
  CHECK(lr.errors[0].line == 2);
}

TEST_CASE("sample_training_questions is deterministic in the seed") {
  auto pool = make_pool(100);
  auto a = sample_training_questions(pool, 20, 42);
  auto b = sample_training_questions(pool, 20, 42);
  auto c = sample_training_questions(pool, 20, 43);
  REQUIRE(a.size() == 20);
  bool same = true, different = false;
  for (std::size_t i = 0; i < 20; ++i) {
    same = same && a[i].id == b[i].id;
    different = different || a[i].id != c[i].id;
  }
  CHECK(same);
  CHECK(different);
}

TEST_CASE("sample_training_questions draws without replacement") {
  auto pool = make_pool(30);
  auto sample = sample_training_questions(pool, 30, 7);
  std::set<std::string> ids;
  for (const auto& r : sample) ids.insert(r.id);
  CHECK(ids.size() == 30);  // full draw is a permutation
}

TEST_CASE("sample_training_questions rejects oversized requests") {
  auto pool = make_pool(5);
  CHECK_THROWS_WITH_AS(sample_training_questions(pool, 6, 1),
                       "cannot sample 6 questions from a pool of 5", std::invalid_argument);
  CHECK(sample_training_questions(pool, 0, 1).empty());
}

TEST_CASE("normalize_answer open_ended strips case, punctuation, articles") {
  CHECK(normalize_answer("  The Eiffel Tower.  ", QuestionType::open_ended).text ==
        "eiffel tower");
  CHECK(normalize_answer("An   apple!!", QuestionType::open_ended).text == "apple");
  CHECK(normalize_answer("a the an answer", QuestionType::open_ended).text == "answer");
  CHECK(normalize_answer("Paris", QuestionType::open_ended).text == "paris");
  CHECK_FALSE(normalize_answer("anything", QuestionType::open_ended).unresolved);
}

TEST_CASE("normalize_answer math strips delimiters but keeps case and symbols") {
  CHECK(normalize_answer("\\(42\\)", QuestionType::math).text == "42");
  CHECK(normalize_answer("$x + Y$", QuestionType::math).text == "x + Y");
  CHECK(normalize_answer("$$\\frac{1}{2}$$.", QuestionType::math).text == "\\frac{1}{2}");
  CHECK(normalize_answer(" \\[ 7 \\] ", QuestionType::math).text == "7");
  CHECK(normalize_answer("3/4", QuestionType::math).text == "3/4");
}

TEST_CASE("normalize_answer yes_no maps by the first decisive token") {
  CHECK(normalize_answer("Yes!", QuestionType::yes_no).text == "yes");
  CHECK(normalize_answer("Nope, not at all", QuestionType::yes_no).text == "no");
  CHECK(normalize_answer("I think that is correct", QuestionType::yes_no).text == "yes");
  CHECK(normalize_answer("That is not true", QuestionType::yes_no).text == "no");

  NormalizedAnswer n = normalize_answer("maybe tomorrow", QuestionType::yes_no);
  CHECK(n.unresolved);
  CHECK(n.text == "maybe tomorrow");
}

TEST_CASE("normalize_answer multiple_choice keeps leading articles") {
  CHECK(normalize_answer("The Moon", QuestionType::multiple_choice).text == "the moon");
  CHECK(normalize_answer("  B.  ", QuestionType::multiple_choice).text == "b");
}
