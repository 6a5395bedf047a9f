#include "vcalib/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace vcalib {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool usable(const ScoredResponse& r) {
  return r.parse_status == ParseStatus::ok || r.parse_status == ParseStatus::clamped;
}

// floor(c*B) nudged onto the [k/B, (k+1)/B) grid so bin membership matches a
// plain range scan even when c*B rounds across an edge.
std::size_t bin_index(double confidence, std::size_t num_bins) {
  auto edge = [num_bins](std::size_t k) {
    return static_cast<double>(k) / static_cast<double>(num_bins);
  };
  double scaled = confidence * static_cast<double>(num_bins);
  std::size_t idx = scaled <= 0.0 ? 0 : static_cast<std::size_t>(scaled);
  if (idx >= num_bins) idx = num_bins - 1;
  while (idx > 0 && confidence < edge(idx)) --idx;
  while (idx + 1 < num_bins && confidence >= edge(idx + 1)) ++idx;
  return idx;
}

double population_std(const std::vector<double>& values, double mean) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size()));
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return kNaN;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

}  // namespace

CalibrationPoint to_calibration_point(const ScoredResponse& response, bool correct) {
  if (!usable(response))
    throw std::invalid_argument("cannot build a calibration point from an unscored response");
  double score = *response.score_percent;
  double confidence = response.mode == ElicitationMode::confidence
                          ? score / 100.0
                          : (100.0 - score) / 100.0;
  return {confidence, correct};
}

double accuracy(const std::vector<CalibrationPoint>& points) {
  if (points.empty()) throw std::invalid_argument("accuracy of an empty point set is undefined");
  std::size_t correct = 0;
  for (const auto& p : points) correct += p.correct ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(points.size());
}

double ece(const std::vector<CalibrationPoint>& points, std::size_t num_bins) {
  if (points.empty()) throw std::invalid_argument("ECE of an empty point set is undefined");
  if (num_bins == 0) throw std::invalid_argument("ECE needs at least one bin");
  std::vector<double> conf_sum(num_bins, 0.0);
  std::vector<std::size_t> correct_count(num_bins, 0), count(num_bins, 0);
  for (const auto& p : points) {
    std::size_t b = bin_index(p.confidence, num_bins);
    conf_sum[b] += p.confidence;
    correct_count[b] += p.correct ? 1 : 0;
    ++count[b];
  }
  double total = static_cast<double>(points.size());
  double result = 0.0;
  for (std::size_t b = 0; b < num_bins; ++b) {
    if (count[b] == 0) continue;
    double nb = static_cast<double>(count[b]);
    double gap = conf_sum[b] / nb - static_cast<double>(correct_count[b]) / nb;
    result += nb / total * std::abs(gap);
  }
  return result;
}

std::vector<ReliabilityBin> reliability_bins(const std::vector<CalibrationPoint>& points,
                                             std::size_t num_bins) {
  if (num_bins == 0) throw std::invalid_argument("need at least one bin");
  std::vector<ReliabilityBin> bins(num_bins);
  for (std::size_t b = 0; b < num_bins; ++b) {
    bins[b].lower = static_cast<double>(b) / static_cast<double>(num_bins);
    bins[b].upper = static_cast<double>(b + 1) / static_cast<double>(num_bins);
  }
  std::vector<double> conf_sum(num_bins, 0.0);
  std::vector<std::size_t> correct_count(num_bins, 0);
  for (const auto& p : points) {
    std::size_t b = bin_index(p.confidence, num_bins);
    conf_sum[b] += p.confidence;
    correct_count[b] += p.correct ? 1 : 0;
    ++bins[b].count;
  }
  for (std::size_t b = 0; b < num_bins; ++b) {
    if (bins[b].count == 0) continue;
    double nb = static_cast<double>(bins[b].count);
    bins[b].mean_confidence = conf_sum[b] / nb;
    bins[b].empirical_accuracy = static_cast<double>(correct_count[b]) / nb;
  }
  return bins;
}

std::optional<double> auroc(const std::vector<CalibrationPoint>& points) {
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& p : points) (p.correct ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].confidence < points[b].confidence;
  });

  // Midranks over tie groups; rank sum of the correct class.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && points[order[j]].confidence == points[order[i]].confidence) ++j;
    double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (points[order[k]].correct) pos_rank_sum += midrank;
    i = j;
  }
  double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

MetricReport make_report(const std::vector<JudgedResponse>& responses, std::size_t num_bins) {
  MetricReport report;
  report.num_bins = num_bins;
  std::vector<CalibrationPoint> points;
  double score_sum = 0.0;
  std::size_t unscored = 0;
  for (const auto& jr : responses) {
    if (!usable(jr.response)) {
      ++unscored;
      continue;
    }
    points.push_back(to_calibration_point(jr.response, jr.correct));
    score_sum += *jr.response.score_percent;
  }
  report.n = points.size();
  report.parse_failure_rate =
      responses.empty() ? 0.0 : static_cast<double>(unscored) / static_cast<double>(responses.size());
  if (points.empty()) {
    report.accuracy = kNaN;
    report.ece = kNaN;
    report.mean_score_percent = kNaN;
    report.bins = reliability_bins(points, num_bins);
    return report;
  }
  report.accuracy = accuracy(points);
  report.ece = ece(points, num_bins);
  report.auroc = auroc(points);
  report.mean_score_percent = score_sum / static_cast<double>(points.size());
  report.bins = reliability_bins(points, num_bins);
  return report;
}

const char* to_string(IterationMetric m) {
  switch (m) {
    case IterationMetric::acc: return "acc";
    case IterationMetric::ece: return "ece";
    case IterationMetric::auroc: return "auroc";
    case IterationMetric::mean_score: return "mean_score";
  }
  return "?";
}

IterationMetric iteration_metric_from_string(const std::string& s) {
  if (s == "acc") return IterationMetric::acc;
  if (s == "ece") return IterationMetric::ece;
  if (s == "auroc") return IterationMetric::auroc;
  if (s == "mean_score") return IterationMetric::mean_score;
  throw std::invalid_argument("unknown iteration metric: " + s);
}

std::vector<IterationStat> iteration_stats(const std::vector<IterationTrace>& traces,
                                           IterationMetric metric, std::size_t num_bins) {
  std::vector<const IterationTrace*> complete;
  for (const auto& t : traces)
    if (t.complete) complete.push_back(&t);
  if (complete.empty()) return {};
  const std::size_t len = complete.front()->entries.size();
  for (const auto* t : complete)
    if (t->entries.size() != len)
      throw std::invalid_argument("iteration traces span different iteration counts");

  std::vector<IterationStat> out;
  out.reserve(len);
  for (std::size_t t = 0; t < len; ++t) {
    IterationStat stat;
    stat.iteration = static_cast<int>(t);
    if (metric == IterationMetric::acc || metric == IterationMetric::mean_score) {
      std::vector<double> values;
      for (const auto* tr : complete) {
        const TraceEntry& e = tr->entries[t];
        if (!usable(e.response)) continue;
        values.push_back(metric == IterationMetric::acc ? (e.correct ? 1.0 : 0.0)
                                                        : *e.response.score_percent);
      }
      stat.n = values.size();
      stat.mean = mean_of(values);
      stat.stddev = values.empty() ? kNaN : population_std(values, stat.mean);
    } else {
      std::vector<CalibrationPoint> points;
      for (const auto* tr : complete) {
        const TraceEntry& e = tr->entries[t];
        if (!usable(e.response)) continue;
        points.push_back(to_calibration_point(e.response, e.correct));
      }
      stat.n = points.size();
      if (points.empty()) {
        stat.mean = kNaN;
      } else if (metric == IterationMetric::ece) {
        stat.mean = ece(points, num_bins);
      } else {
        auto value = auroc(points);
        stat.mean = value ? *value : kNaN;
      }
      stat.stddev = 0.0;
    }
    out.push_back(stat);
  }
  return out;
}

}  // namespace vcalib
