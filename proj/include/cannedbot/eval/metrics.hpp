// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <vector>

#include "cannedbot/jsonl.hpp"

namespace cannedbot::eval {

/// Scores over n candidates, higher is better.
struct RankingCase {
  std::vector<double> scores;
  int true_index = 0;
};

/// 1-based rank of the true candidate under descending score; equal scores
/// rank the lower candidate index first.
int true_rank(const RankingCase& c);

/// Fraction of cases whose true candidate ranks within the top k. Throws
/// KTooLarge if some case has fewer than k candidates, InvalidArgument for
/// k < 1 or a bad true_index and EmptyInput for no cases.
double recall_at_k(std::span<const RankingCase> cases, int k);

/// Mean 1-based rank of the true candidate. Throws EmptyInput for no cases.
double avg_pos(std::span<const RankingCase> cases);

struct RecallReport {
  std::size_t cases = 0;
  std::map<int, double> recall;  // k -> R@k
  double avg_pos = 0.0;
};

/// R@k for every k in `ks` no larger than the smallest candidate count.
RecallReport summarize(std::span<const RankingCase> cases, std::span<const int> ks);
Json to_json(const RecallReport& r);

}  // namespace cannedbot::eval
