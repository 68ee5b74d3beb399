// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/eval/calibration.hpp"

#include "cannedbot/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cannedbot::eval {

namespace {

constexpr double kHistogramLow = -1.0;
constexpr std::size_t kHistogramBins = 40;

}  // namespace

std::vector<HistogramBin> confidence_histogram(std::span<const ConfidenceCase> cases) {
  std::vector<HistogramBin> bins(kHistogramBins);
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    bins[b].lower = kHistogramLow + kHistogramBinWidth * static_cast<double>(b);
    bins[b].upper = bins[b].lower + kHistogramBinWidth;
  }
  for (const ConfidenceCase& c : cases) {
    const double pos = std::floor((c.confidence - kHistogramLow) / kHistogramBinWidth);
    const auto b = static_cast<std::size_t>(
        std::clamp(pos, 0.0, static_cast<double>(kHistogramBins - 1)));
    ++bins[b].count;
    bins[b].correct += c.correct;
  }
  return bins;
}

ThresholdReport evaluate_threshold(std::span<const ConfidenceCase> cases, double threshold) {
  ThresholdReport r;
  r.threshold = threshold;
  r.cases = cases.size();
  std::size_t suggested = 0, suggested_correct = 0, correct = 0;
  for (const ConfidenceCase& c : cases) {
    correct += c.correct;
    if (c.confidence >= threshold) {
      ++suggested;
      suggested_correct += c.correct;
    }
  }
  const auto n = static_cast<double>(std::max<std::size_t>(cases.size(), 1));
  r.suggestion_rate = static_cast<double>(suggested) / n;
  r.accuracy_when_suggesting =
      suggested == 0 ? 0.0 : static_cast<double>(suggested_correct) / static_cast<double>(suggested);
  r.overall_accuracy = static_cast<double>(correct) / n;
  r.target_rate = r.suggestion_rate;
  r.histogram = confidence_histogram(cases);
  return r;
}

ThresholdReport calibrate_threshold(std::span<const ConfidenceCase> cases, double target_rate) {
  if (cases.size() < kMinCalibrationCases) {
    throw Error(ErrorCode::kTooFewCases, "calibration needs >= " +
                                             std::to_string(kMinCalibrationCases) + " cases, got " +
                                             std::to_string(cases.size()));
  }
  if (!(target_rate >= 0.0 && target_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target_rate must be in [0, 1]");
  }
  std::vector<double> sorted;
  sorted.reserve(cases.size());
  for (const auto& c : cases) sorted.push_back(c.confidence);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const auto keep = static_cast<std::size_t>(std::llround(target_rate * static_cast<double>(n)));
  const double threshold = keep == 0 ? std::nextafter(sorted.back(), std::numeric_limits<double>::infinity())
                                     : sorted[n - keep];
  ThresholdReport r = evaluate_threshold(cases, threshold);
  r.target_rate = target_rate;
  return r;
}

Json to_json(const ThresholdReport& r) {
  Json bins = Json::array();
  for (const auto& b : r.histogram) {
    bins.push_back({{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}, {"correct", b.correct}});
  }
  return {{"threshold", r.threshold},
          {"target_rate", r.target_rate},
          {"suggestion_rate", r.suggestion_rate},
          {"accuracy_when_suggesting", r.accuracy_when_suggesting},
          {"overall_accuracy", r.overall_accuracy},
          {"cases", r.cases},
          {"histogram", std::move(bins)}};
}

ThresholdReport threshold_report_from_json(const Json& j) {
  ThresholdReport r;
  r.threshold = j.at("threshold").get<double>();
  r.target_rate = j.value("target_rate", 0.0);
  r.suggestion_rate = j.value("suggestion_rate", 0.0);
  r.accuracy_when_suggesting = j.value("accuracy_when_suggesting", 0.0);
  r.overall_accuracy = j.value("overall_accuracy", 0.0);
  r.cases = j.value("cases", std::size_t{0});
  if (j.contains("histogram")) {
    for (const auto& b : j["histogram"]) {
      r.histogram.push_back({b.at("lower").get<double>(), b.at("upper").get<double>(),
                             b.at("count").get<std::size_t>(), b.at("correct").get<std::size_t>()});
    }
  }
  return r;
}

}  // namespace cannedbot::eval
