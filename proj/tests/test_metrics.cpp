#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "vcalib/metrics.hpp"

using namespace vcalib;

namespace {

// Brute-force ECE oracle: scans every bin range directly instead of indexing,
// with the same equal-width right-open bins (last bin closed above).
double ece_oracle(const std::vector<CalibrationPoint>& points, std::size_t num_bins) {
  double result = 0.0;
  for (std::size_t k = 0; k < num_bins; ++k) {
    double lower = static_cast<double>(k) / static_cast<double>(num_bins);
    double upper = static_cast<double>(k + 1) / static_cast<double>(num_bins);
    double conf_sum = 0.0;
    std::size_t correct = 0, count = 0;
    for (const auto& p : points) {
      bool in_bin = k + 1 == num_bins ? p.confidence >= lower
                                      : p.confidence >= lower && p.confidence < upper;
      if (!in_bin) continue;
      conf_sum += p.confidence;
      correct += p.correct ? 1 : 0;
      ++count;
    }
    if (count == 0) continue;
    double nb = static_cast<double>(count);
    result += nb / static_cast<double>(points.size()) *
              std::abs(conf_sum / nb - static_cast<double>(correct) / nb);
  }
  return result;
}

// O(n^2) tie-aware pairwise AUROC oracle.
double auroc_oracle(const std::vector<CalibrationPoint>& points) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (const auto& pos : points) {
    if (!pos.correct) continue;
    for (const auto& neg : points) {
      if (neg.correct) continue;
      ++pairs;
      if (pos.confidence > neg.confidence)
        wins += 1.0;
      else if (pos.confidence == neg.confidence)
        wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

ScoredResponse scored(double percent, ElicitationMode mode) {
  ScoredResponse r;
  r.score_percent = percent;
  r.mode = mode;
  r.parse_status = ParseStatus::ok;
  return r;
}

ScoredResponse unscored(ParseStatus status) {
  ScoredResponse r;
  r.parse_status = status;
  return r;
}

}  // namespace

TEST_CASE("to_calibration_point maps confidence directly and uncertainty inversely") {
  CHECK(to_calibration_point(scored(85.0, ElicitationMode::confidence), true).confidence ==
        0.85);
  CHECK(to_calibration_point(scored(85.0, ElicitationMode::uncertainty), true).confidence ==
        (100.0 - 85.0) / 100.0);
  CHECK(to_calibration_point(scored(0.0, ElicitationMode::uncertainty), false).confidence ==
        1.0);
  CHECK_THROWS_AS(to_calibration_point(unscored(ParseStatus::failed), true),
                  std::invalid_argument);
  CHECK_THROWS_AS(to_calibration_point(unscored(ParseStatus::answer_only), true),
                  std::invalid_argument);
}

TEST_CASE("accuracy is the correct fraction") {
  std::vector<CalibrationPoint> points = {{0.5, true}, {0.5, false}, {0.1, true}, {0.9, true}};
  CHECK(accuracy(points) == 0.75);
  CHECK_THROWS_AS(accuracy({}), std::invalid_argument);
}

TEST_CASE("ece matches the worked four-point fixture exactly") {
  // Two points in the (0.8,0.9] bin with accuracy 1/2, two in [0.1,0.2)
  // with accuracy 0: 0.5*|0.9-0.5| + 0.5*|0.1-0| = 0.25.
  std::vector<CalibrationPoint> points = {
      {0.9, true}, {0.9, false}, {0.1, false}, {0.1, false}};
  CHECK(ece(points, 10) == 0.25);
}

TEST_CASE("ece handles the degenerate single-bin case") {
  std::vector<CalibrationPoint> points = {{0.2, true}, {0.6, false}};
  // one bin: |mean_conf - acc| = |0.4 - 0.5|
  CHECK(ece(points, 1) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(ece({}, 10), std::invalid_argument);
  CHECK_THROWS_AS(ece(points, 0), std::invalid_argument);
}

TEST_CASE("ece equals the brute-force oracle on random point sets") {
  std::mt19937_64 gen(1234);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + gen() % 500;
    std::vector<CalibrationPoint> points;
    for (std::size_t i = 0; i < n; ++i) {
      double c = unif(gen);
      if (gen() % 4 == 0) c = static_cast<double>(gen() % 16) / 15.0;  // exact edge stress
      points.push_back({c, gen() % 2 == 0});
    }
    for (std::size_t bins : {1, 5, 10, 15}) {
      CAPTURE(trial);
      CAPTURE(bins);
      CHECK(std::abs(ece(points, bins) - ece_oracle(points, bins)) <= 1e-12);
    }
  }
}

TEST_CASE("auroc matches the worked fixture exactly") {
  std::vector<CalibrationPoint> points = {
      {0.8, true}, {0.8, false}, {0.3, true}, {0.2, false}};
  auto v = auroc(points);
  REQUIRE(v.has_value());
  CHECK(*v == 0.625);
}

TEST_CASE("auroc is undefined for single-class sets") {
  CHECK_FALSE(auroc({{0.5, true}, {0.9, true}}).has_value());
  CHECK_FALSE(auroc({{0.5, false}}).has_value());
  CHECK_FALSE(auroc({}).has_value());
}

TEST_CASE("auroc hits the separability extremes") {
  CHECK(*auroc({{0.9, true}, {0.8, true}, {0.2, false}, {0.1, false}}) == 1.0);
  CHECK(*auroc({{0.1, true}, {0.9, false}}) == 0.0);
  CHECK(*auroc({{0.5, true}, {0.5, false}, {0.5, true}}) == 0.5);
}

TEST_CASE("auroc equals the pairwise oracle on random tied sets") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 2 + gen() % 300;
    std::vector<CalibrationPoint> points;
    for (std::size_t i = 0; i < n; ++i)
      points.push_back({static_cast<double>(gen() % 21) / 20.0, gen() % 2 == 0});
    points[0].correct = true;  // force both classes
    points[1].correct = false;
    CAPTURE(trial);
    CHECK(std::abs(*auroc(points) - auroc_oracle(points)) <= 1e-12);
  }
}

TEST_CASE("reliability_bins covers [0,1] with empty bins kept") {
  std::vector<CalibrationPoint> points = {{0.05, true}, {0.07, false}, {0.95, true}};
  auto bins = reliability_bins(points, 10);
  REQUIRE(bins.size() == 10);
  CHECK(bins[0].count == 2);
  CHECK(bins[0].mean_confidence == doctest::Approx(0.06));
  CHECK(bins[0].empirical_accuracy == 0.5);
  CHECK(bins[9].count == 1);
  CHECK(bins[3].count == 0);
  CHECK(bins[3].lower == 0.3);
  CHECK(bins[3].upper == 0.4);
  std::size_t total = 0;
  for (const auto& b : bins) total += b.count;
  CHECK(total == points.size());
}

TEST_CASE("make_report excludes unscored responses and counts them as parse failures") {
  std::vector<JudgedResponse> responses = {
      {scored(90.0, ElicitationMode::confidence), true},
      {scored(10.0, ElicitationMode::confidence), false},
      {unscored(ParseStatus::failed), false},
      {unscored(ParseStatus::answer_only), true},
  };
  MetricReport r = make_report(responses, 10);
  CHECK(r.n == 2);
  CHECK(r.parse_failure_rate == 0.5);  // answer_only has no score either
  CHECK(r.accuracy == 0.5);
  CHECK(r.mean_score_percent == 50.0);
  CHECK(r.num_bins == 10);
  CHECK(r.bins.size() == 10);
  REQUIRE(r.auroc.has_value());
  CHECK(*r.auroc == 1.0);
}

TEST_CASE("make_report surfaces an all-failed set as NaN metrics") {
  std::vector<JudgedResponse> responses = {{unscored(ParseStatus::failed), false}};
  MetricReport r = make_report(responses, 10);
  CHECK(r.n == 0);
  CHECK(r.parse_failure_rate == 1.0);
  CHECK(std::isnan(r.accuracy));
  CHECK(std::isnan(r.ece));
  CHECK_FALSE(r.auroc.has_value());
  CHECK(std::isnan(r.mean_score_percent));
}

TEST_CASE("clamped responses still enter the metrics") {
  ScoredResponse r = scored(100.0, ElicitationMode::confidence);
  r.parse_status = ParseStatus::clamped;
  MetricReport report = make_report({{r, true}}, 10);
  CHECK(report.n == 1);
  CHECK(report.parse_failure_rate == 0.0);
}

namespace {

IterationTrace make_trace(const std::string& id, const std::vector<double>& scores,
                          const std::vector<bool>& correct, bool complete = true) {
  IterationTrace t;
  t.record_id = id;
  t.complete = complete;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    TraceEntry e;
    e.iteration = static_cast<int>(i);
    e.response = scored(scores[i], ElicitationMode::confidence);
    e.correct = correct[i];
    t.entries.push_back(e);
  }
  return t;
}

}  // namespace

TEST_CASE("iteration_stats: two traces with scores 40 and 60 give mean 50, std 10") {
  std::vector<IterationTrace> traces = {
      make_trace("a", {50.0, 40.0}, {true, true}),
      make_trace("b", {50.0, 60.0}, {false, true}),
  };
  auto stats = iteration_stats(traces, IterationMetric::mean_score, 10);
  REQUIRE(stats.size() == 2);
  CHECK(stats[1].iteration == 1);
  CHECK(stats[1].mean == 50.0);
  CHECK(stats[1].stddev == 10.0);  // population convention
  CHECK(stats[1].n == 2);

  auto acc = iteration_stats(traces, IterationMetric::acc, 10);
  CHECK(acc[0].mean == 0.5);
  CHECK(acc[0].stddev == 0.5);
  CHECK(acc[1].mean == 1.0);
  CHECK(acc[1].stddev == 0.0);
}

TEST_CASE("iteration_stats reports set-level ece/auroc with zero spread") {
  std::vector<IterationTrace> traces = {
      make_trace("a", {90.0, 90.0}, {true, true}),
      make_trace("b", {90.0, 10.0}, {false, false}),
      make_trace("c", {10.0, 10.0}, {false, false}),
      make_trace("d", {10.0, 90.0}, {false, true}),
  };
  auto stats = iteration_stats(traces, IterationMetric::ece, 10);
  REQUIRE(stats.size() == 2);
  std::vector<CalibrationPoint> at0 = {
      {0.9, true}, {0.9, false}, {0.1, false}, {0.1, false}};
  CHECK(stats[0].mean == ece(at0, 10));
  CHECK(stats[0].stddev == 0.0);

  auto roc = iteration_stats(traces, IterationMetric::auroc, 10);
  CHECK_FALSE(std::isnan(roc[0].mean));
}

TEST_CASE("iteration_stats skips incomplete traces entirely") {
  std::vector<IterationTrace> traces = {
      make_trace("a", {40.0, 40.0}, {true, true}),
      make_trace("b", {60.0}, {false}, false),  // truncated by a transport failure
  };
  auto stats = iteration_stats(traces, IterationMetric::mean_score, 10);
  REQUIRE(stats.size() == 2);
  CHECK(stats[0].mean == 40.0);
  CHECK(stats[0].n == 1);
}

TEST_CASE("iteration_stats rejects complete traces of mismatched lengths") {
  std::vector<IterationTrace> traces = {
      make_trace("a", {40.0, 40.0}, {true, true}),
      make_trace("b", {60.0}, {false}),
  };
  CHECK_THROWS_WITH_AS(iteration_stats(traces, IterationMetric::acc, 10),
                       "iteration traces span different iteration counts",
                       std::invalid_argument);
}

TEST_CASE("iteration_stats tolerates unusable entries within an iteration") {
  auto t1 = make_trace("a", {40.0, 40.0}, {true, true});
  auto t2 = make_trace("b", {60.0, 60.0}, {true, false});
  t2.entries[1].response = unscored(ParseStatus::failed);
  auto stats = iteration_stats({t1, t2}, IterationMetric::mean_score, 10);
  CHECK(stats[0].mean == 50.0);
  CHECK(stats[1].mean == 40.0);  // only the usable entry remains
  CHECK(stats[1].n == 1);

  CHECK(iteration_stats({}, IterationMetric::acc, 10).empty());
}
