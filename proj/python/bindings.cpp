#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vcalib/builder.hpp"
#include "vcalib/commands.hpp"
#include "vcalib/dataset.hpp"
#include "vcalib/gateway.hpp"
#include "vcalib/hash.hpp"
#include "vcalib/metrics.hpp"
#include "vcalib/parser.hpp"
#include "vcalib/prompts.hpp"
#include "vcalib/run_config.hpp"

namespace py = pybind11;
using namespace vcalib;

namespace {

QARecord record_from_dict(const py::dict& d) {
  QARecord rec;
  rec.id = py::cast<std::string>(d["id"]);
  rec.question = py::cast<std::string>(d["question"]);
  rec.question_type = question_type_from_string(py::cast<std::string>(d["question_type"]));
  rec.gold_answer = py::cast<std::string>(d["gold_answer"]);
  if (d.contains("choices")) rec.choices = py::cast<std::vector<std::string>>(d["choices"]);
  if (d.contains("reference_solution"))
    rec.reference_solution = py::cast<std::string>(d["reference_solution"]);
  if (d.contains("source_benchmark"))
    rec.source_benchmark = py::cast<std::string>(d["source_benchmark"]);
  validate(rec);
  return rec;
}

py::dict response_to_dict(const ScoredResponse& r) {
  py::dict d;
  d["raw_text"] = r.raw_text;
  d["reasoning"] = r.reasoning;
  d["answer"] = r.answer;
  d["answer_raw"] = r.answer_raw;
  d["score_percent"] = r.score_percent ? py::cast(*r.score_percent) : py::none();
  d["mode"] = std::string(to_string(r.mode));
  d["parse_status"] = std::string(to_string(r.parse_status));
  return d;
}

ScoredResponse response_from_dict(const py::dict& d) {
  ScoredResponse r;
  r.raw_text = py::cast<std::string>(d["raw_text"]);
  if (d.contains("reasoning")) r.reasoning = py::cast<std::string>(d["reasoning"]);
  if (d.contains("answer")) r.answer = py::cast<std::string>(d["answer"]);
  if (d.contains("answer_raw")) r.answer_raw = py::cast<std::string>(d["answer_raw"]);
  if (d.contains("score_percent") && !d["score_percent"].is_none())
    r.score_percent = py::cast<double>(d["score_percent"]);
  r.mode = mode_from_string(py::cast<std::string>(d["mode"]));
  r.parse_status = parse_status_from_string(py::cast<std::string>(d["parse_status"]));
  return r;
}

std::vector<CalibrationPoint> points_from_pairs(
    const std::vector<std::pair<double, bool>>& pairs) {
  std::vector<CalibrationPoint> points;
  points.reserve(pairs.size());
  for (const auto& [c, correct] : pairs) points.push_back({c, correct});
  return points;
}

}  // namespace

PYBIND11_MODULE(_vcalib, m) {
  m.doc() = "verbalized-confidence calibration harness (C++ core)";

  m.def("split_reasoning", &split_reasoning, py::arg("raw_text"),
        "Split raw text at the last </think> into (reasoning, final_segment).");

  m.def(
      "parse_scored_answer",
      [](const std::string& raw, const std::string& mode, const std::string& question_type) {
        return response_to_dict(parse_scored_answer(raw, mode_from_string(mode),
                                                    question_type_from_string(question_type)));
      },
      py::arg("raw_text"), py::arg("mode"), py::arg("question_type"));

  m.def("rewrite_score_percent", &rewrite_score_percent, py::arg("raw_text"),
        py::arg("percent"));

  m.def(
      "judge_correct",
      [](const py::dict& response, const py::dict& record) {
        return judge_correct(response_from_dict(response), record_from_dict(record));
      },
      py::arg("response"), py::arg("record"));

  m.def(
      "normalize_answer",
      [](const std::string& text, const std::string& question_type) {
        NormalizedAnswer n = normalize_answer(text, question_type_from_string(question_type));
        return py::make_tuple(n.text, n.unresolved);
      },
      py::arg("text"), py::arg("question_type"));

  m.def(
      "ece",
      [](const std::vector<std::pair<double, bool>>& pairs, std::size_t num_bins) {
        return ece(points_from_pairs(pairs), num_bins);
      },
      py::arg("points"), py::arg("num_bins") = 10);

  m.def(
      "auroc",
      [](const std::vector<std::pair<double, bool>>& pairs) -> py::object {
        auto v = auroc(points_from_pairs(pairs));
        return v ? py::cast(*v) : py::none();
      },
      py::arg("points"));

  m.def(
      "reliability_bins",
      [](const std::vector<std::pair<double, bool>>& pairs, std::size_t num_bins) {
        py::list out;
        for (const auto& b : reliability_bins(points_from_pairs(pairs), num_bins)) {
          py::dict d;
          d["lower"] = b.lower;
          d["upper"] = b.upper;
          d["count"] = b.count;
          d["mean_confidence"] = b.mean_confidence;
          d["empirical_accuracy"] = b.empirical_accuracy;
          out.append(d);
        }
        return out;
      },
      py::arg("points"), py::arg("num_bins") = 10);

  m.def(
      "render_vanilla",
      [](const py::dict& record, const std::string& mode) {
        return PromptLibrary::builtin().render_vanilla(record_from_dict(record),
                                                       mode_from_string(mode));
      },
      py::arg("record"), py::arg("mode"));

  m.def(
      "render_self_critique",
      [](const py::dict& record, const std::string& mode,
         const std::vector<std::string>& history) {
        return PromptLibrary::builtin().render_self_critique(record_from_dict(record),
                                                             mode_from_string(mode), history);
      },
      py::arg("record"), py::arg("mode"), py::arg("history"));

  m.def(
      "render_critique_generation",
      [](const py::dict& record, const std::string& student_response, bool think_structured) {
        return PromptLibrary::builtin().render_critique_generation(
            record_from_dict(record), student_response, think_structured);
      },
      py::arg("record"), py::arg("student_response"), py::arg("think_structured") = false);

  m.def("extract_judgment",
        [](const std::string& text) { return std::string(to_string(extract_judgment(text))); });

  m.def("mock_reply", &mock_reply, py::arg("model_name"), py::arg("prompt"),
        py::arg("is_reasoning_model") = false,
        "Deterministic stand-in model reply (seeded by model name + prompt).");

  m.def(
      "sha256_hex", [](const std::string& data) { return sha256_hex(data); }, py::arg("data"));

  m.def(
      "evaluate",
      [](const std::string& config_path) { return run_evaluate(load_run_config(config_path)); },
      py::arg("config_path"));
  m.def(
      "self_critique",
      [](const std::string& config_path) {
        return run_self_critique(load_run_config(config_path));
      },
      py::arg("config_path"));
  m.def(
      "build_data",
      [](const std::string& config_path, const std::vector<std::string>& variants) {
        std::vector<TrainingVariant> parsed;
        for (const auto& v : variants) parsed.push_back(training_variant_from_string(v));
        return run_build_data(load_run_config(config_path), parsed);
      },
      py::arg("config_path"), py::arg("variants") = std::vector<std::string>{});
  m.def(
      "report", [](const std::string& run_dir) { return run_report(run_dir); },
      py::arg("run_dir"));
}
