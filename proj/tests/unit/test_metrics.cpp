// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "cannedbot/error.hpp"
#include "cannedbot/eval/calibration.hpp"
#include "cannedbot/eval/metrics.hpp"
#include "cannedbot/numerics/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace cannedbot;
using namespace cannedbot::eval;
using numerics::Rng;

namespace {

std::vector<RankingCase> random_cases(Rng& rng, int count, int n, bool coarse = false) {
  std::vector<RankingCase> cases;
  for (int c = 0; c < count; ++c) {
    RankingCase rc;
    for (int j = 0; j < n; ++j) {
      // Coarse scores force ties so the tie rule is exercised.
      rc.scores.push_back(coarse ? static_cast<double>(rng.index(4)) : rng.uniform(-1.0, 1.0));
    }
    rc.true_index = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    cases.push_back(std::move(rc));
  }
  return cases;
}

// Full stable sort by (score desc, index asc).
int sorted_rank(const RankingCase& c) {
  std::vector<int> idx(c.scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return c.scores[a] > c.scores[b]; });
  return static_cast<int>(std::find(idx.begin(), idx.end(), c.true_index) - idx.begin()) + 1;
}

double oracle_recall(const std::vector<RankingCase>& cases, int k) {
  int hits = 0;
  for (const auto& c : cases) hits += sorted_rank(c) <= k;
  return static_cast<double>(hits) / static_cast<double>(cases.size());
}

std::vector<ConfidenceCase> confidences(Rng& rng, int n) {
  std::vector<ConfidenceCase> out;
  for (int i = 0; i < n; ++i) {
    const double conf = rng.uniform(-1.0, 1.0);
    out.push_back({conf, rng.bernoulli(0.5 + 0.4 * conf)});
  }
  return out;
}

}  // namespace

TEST_CASE("recall at k = n is one and a strict top-1 hit counts") {
  Rng rng(1);
  const auto cases = random_cases(rng, 50, 7);
  CHECK(recall_at_k(cases, 7) == 1.0);
  const std::vector<RankingCase> single{{{0.1, 0.9, 0.3}, 1}};
  CHECK(recall_at_k(single, 1) == 1.0);
  CHECK(avg_pos(single) == 1.0);
}

TEST_CASE("ties rank the lower candidate index first") {
  CHECK(true_rank({{0.5, 0.5, 0.5}, 0}) == 1);
  CHECK(true_rank({{0.5, 0.5, 0.5}, 2}) == 3);
  CHECK(true_rank({{0.2, 0.5, 0.5}, 2}) == 2);
}

TEST_CASE("recall matches a brute-force sort on 1000 random score matrices") {
  Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(30));
    const auto cases = random_cases(rng, 1 + static_cast<int>(rng.index(12)), n, trial % 2 == 0);
    const int k = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    REQUIRE(recall_at_k(cases, k) == oracle_recall(cases, k));
    double pos = 0.0;
    for (const auto& c : cases) pos += sorted_rank(c);
    REQUIRE(avg_pos(cases) == doctest::Approx(pos / static_cast<double>(cases.size())).epsilon(1e-12));
  }
}

TEST_CASE("recall is non-decreasing in k and invariant under monotone transforms") {
  Rng rng(3);
  const auto cases = random_cases(rng, 200, 20);
  auto transformed = cases;
  for (auto& c : transformed) {
    for (auto& s : c.scores) s = std::exp(3.0 * s) - 7.0;
  }
  double prev = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double r = recall_at_k(cases, k);
    CHECK(r >= prev);
    CHECK(recall_at_k(transformed, k) == r);
    prev = r;
  }
  CHECK(prev == 1.0);
}

TEST_CASE("avg_pos is at least one and equals one exactly when R@1 is one") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto cases = random_cases(rng, 5, 6, true);
    CHECK(avg_pos(cases) >= 1.0);
    CHECK((avg_pos(cases) == 1.0) == (recall_at_k(cases, 1) == 1.0));
  }
  std::vector<RankingCase> top{{{1.0, 0.0}, 0}, {{0.0, 1.0}, 1}};
  CHECK(avg_pos(top) == 1.0);
}

TEST_CASE("uniform random scores over 290 candidates give a mean rank near 145.5") {
  Rng rng(5);
  const auto cases = random_cases(rng, 2000, 290);
  CHECK(std::abs(avg_pos(cases) - 145.5) <= 5.0);
}

TEST_CASE("metric errors") {
  Rng rng(6);
  const auto cases = random_cases(rng, 3, 5);
  CHECK_THROWS_WITH_AS(recall_at_k(cases, 6), doctest::Contains("k"), Error);
  try {
    recall_at_k(cases, 6);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kKTooLarge);
  }
  try {
    avg_pos(std::vector<RankingCase>{});
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyInput);
  }
  try {
    recall_at_k(cases, 0);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("summarize skips k above the smallest candidate count") {
  Rng rng(7);
  const auto cases = random_cases(rng, 40, 5);
  const std::vector<int> ks{1, 3, 10};
  const auto report = summarize(cases, ks);
  CHECK(report.cases == 40);
  CHECK(report.recall.count(1) == 1);
  CHECK(report.recall.count(3) == 1);
  CHECK(report.recall.count(10) == 0);
  CHECK(report.recall.at(3) == recall_at_k(cases, 3));
  CHECK(to_json(report)["avg_pos"].get<double>() == avg_pos(cases));
}

TEST_CASE("calibrated threshold reaches the target suggestion rate") {
  Rng rng(8);
  const auto cases = confidences(rng, 1000);
  for (double rate : {0.3, 0.5, 0.7, 0.9}) {
    const auto report = calibrate_threshold(cases, rate);
    CHECK(std::abs(report.suggestion_rate - rate) <= 0.05);
    CHECK(report.suggestion_rate >= 0.0);
    CHECK(report.suggestion_rate <= 1.0);
    CHECK(report.target_rate == rate);
  }
  const auto all = calibrate_threshold(cases, 1.0);
  double min_conf = 1.0;
  for (const auto& c : cases) min_conf = std::min(min_conf, c.confidence);
  CHECK(all.threshold <= min_conf);
  CHECK(all.suggestion_rate == 1.0);
  CHECK(calibrate_threshold(cases, 0.0).suggestion_rate == 0.0);
}

TEST_CASE("accuracy when suggesting counts only cases at or above the threshold") {
  std::vector<ConfidenceCase> cases;
  for (int i = 0; i < 100; ++i) cases.push_back({i / 100.0, i >= 80});
  const auto report = evaluate_threshold(cases, 0.8);
  CHECK(report.suggestion_rate == doctest::Approx(0.2));
  CHECK(report.accuracy_when_suggesting == 1.0);
  CHECK(report.overall_accuracy == doctest::Approx(0.2));
  const auto half = evaluate_threshold(cases, 0.6);
  CHECK(half.accuracy_when_suggesting == doctest::Approx(0.5));
}

TEST_CASE("histogram partitions every case into width-0.05 bins") {
  Rng rng(9);
  auto cases = confidences(rng, 500);
  cases.push_back({1.0, true});
  cases.push_back({-1.0, false});
  cases.push_back({1.5, true});  // clamped into the top bin
  const auto bins = confidence_histogram(cases);
  CHECK(bins.size() == 40);
  std::size_t total = 0;
  for (const auto& b : bins) {
    CHECK(b.upper - b.lower == doctest::Approx(kHistogramBinWidth));
    CHECK(b.correct <= b.count);
    total += b.count;
  }
  CHECK(total == cases.size());
  CHECK(bins.front().lower == doctest::Approx(-1.0));
  CHECK(bins.back().upper == doctest::Approx(1.0));
}

TEST_CASE("calibration input validation and report round-trip") {
  Rng rng(10);
  const auto few = confidences(rng, 99);
  try {
    calibrate_threshold(few, 0.7);
    FAIL("expected TooFewCases");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooFewCases);
  }
  const auto cases = confidences(rng, 100);
  CHECK_THROWS_AS(calibrate_threshold(cases, 1.5), Error);
  const auto report = calibrate_threshold(cases, 0.7);
  const auto back = threshold_report_from_json(to_json(report));
  CHECK(back.threshold == report.threshold);
  CHECK(back.suggestion_rate == report.suggestion_rate);
  CHECK(back.histogram.size() == report.histogram.size());
  CHECK(back.histogram[20].count == report.histogram[20].count);
}
