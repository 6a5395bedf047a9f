#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vcalib/types.hpp"

namespace vcalib {

struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double mean_confidence = 0.0;    // 0 for empty bins
  double empirical_accuracy = 0.0;  // 0 for empty bins
};

struct MetricReport {
  std::size_t n = 0;  // scored responses feeding the metrics
  double accuracy = 0.0;
  double ece = 0.0;
  std::optional<double> auroc;  // absent when one correctness class is missing
  double parse_failure_rate = 0.0;
  double mean_score_percent = 0.0;  // mean verbalized score, no inversion
  std::size_t num_bins = 10;
  std::vector<ReliabilityBin> bins;
};

// A parsed response paired with its correctness verdict.
struct JudgedResponse {
  ScoredResponse response;
  bool correct = false;
};

// confidence mode: score/100; uncertainty mode: (100-score)/100.
// Throws std::invalid_argument unless parse_status is ok or clamped.
CalibrationPoint to_calibration_point(const ScoredResponse& response, bool correct);

double accuracy(const std::vector<CalibrationPoint>& points);

// Equal-width bins over [0,1], right-closed last bin.
double ece(const std::vector<CalibrationPoint>& points, std::size_t num_bins);

std::vector<ReliabilityBin> reliability_bins(const std::vector<CalibrationPoint>& points,
                                             std::size_t num_bins);

// Mann-Whitney formulation, ties credited 0.5; nullopt when either class
// is empty.
std::optional<double> auroc(const std::vector<CalibrationPoint>& points);

// Score-less responses (failed or answer_only) are excluded from every
// metric and counted into parse_failure_rate.
MetricReport make_report(const std::vector<JudgedResponse>& responses, std::size_t num_bins);

enum class IterationMetric { acc, ece, auroc, mean_score };

const char* to_string(IterationMetric m);
IterationMetric iteration_metric_from_string(const std::string& s);

struct IterationStat {
  int iteration = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population std; 0 for the set-level ece/auroc
  std::size_t n = 0;    // contributing traces (acc/mean_score) or points (ece/auroc)
};

// Cross-section statistics at each iteration over complete traces.
// acc/mean_score: mean and population std of per-trace values; ece/auroc:
// the set-level value with std 0. Incomplete traces are skipped; complete
// traces of mismatched length are an error. Undefined values surface as NaN.
std::vector<IterationStat> iteration_stats(const std::vector<IterationTrace>& traces,
                                           IterationMetric metric, std::size_t num_bins);

}  // namespace vcalib
