// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/jsonl.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace cannedbot::eval {

inline constexpr double kHistogramBinWidth = 0.05;
inline constexpr std::size_t kMinCalibrationCases = 100;

/// Top-1 confidence on one held-out context and whether that top-1 was right.
struct ConfidenceCase {
  double confidence = 0.0;
  bool correct = false;
};

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  std::size_t correct = 0;
};

struct ThresholdReport {
  double threshold = 0.0;
  double target_rate = 0.0;
  double suggestion_rate = 0.0;
  double accuracy_when_suggesting = 0.0;
  double overall_accuracy = 0.0;
  std::size_t cases = 0;
  /// Bins of width 0.05 spanning [-1, 1]; every case falls in exactly one.
  std::vector<HistogramBin> histogram;
};

/// Threshold at the (1 - target_rate) quantile of the confidences, so
/// roughly target_rate of the cases reach it. Throws TooFewCases below 100
/// cases and InvalidArgument for target_rate outside [0, 1].
ThresholdReport calibrate_threshold(std::span<const ConfidenceCase> cases, double target_rate);

/// Suggestion rate and accuracy of an already chosen threshold.
ThresholdReport evaluate_threshold(std::span<const ConfidenceCase> cases, double threshold);

std::vector<HistogramBin> confidence_histogram(std::span<const ConfidenceCase> cases);

Json to_json(const ThresholdReport& r);
ThresholdReport threshold_report_from_json(const Json& j);

}  // namespace cannedbot::eval
