// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/eval/metrics.hpp"

#include "cannedbot/error.hpp"

#include <algorithm>

namespace cannedbot::eval {

int true_rank(const RankingCase& c) {
  const auto n = static_cast<int>(c.scores.size());
  if (c.true_index < 0 || c.true_index >= n) {
    throw Error(ErrorCode::kInvalidArgument, "true_index " + std::to_string(c.true_index) +
                                                 " outside " + std::to_string(n) + " candidates");
  }
  const double s = c.scores[static_cast<std::size_t>(c.true_index)];
  int rank = 1;
  for (int j = 0; j < n; ++j) {
    const double o = c.scores[static_cast<std::size_t>(j)];
    if (o > s || (o == s && j < c.true_index)) ++rank;
  }
  return rank;
}

double recall_at_k(std::span<const RankingCase> cases, int k) {
  if (cases.empty()) throw Error(ErrorCode::kEmptyInput, "recall_at_k: no cases");
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "recall_at_k: k must be >= 1");
  std::size_t hits = 0;
  for (const RankingCase& c : cases) {
    if (static_cast<std::size_t>(k) > c.scores.size()) {
      throw Error(ErrorCode::kKTooLarge, "k=" + std::to_string(k) + " exceeds " +
                                             std::to_string(c.scores.size()) + " candidates");
    }
    hits += true_rank(c) <= k;
  }
  return static_cast<double>(hits) / static_cast<double>(cases.size());
}

double avg_pos(std::span<const RankingCase> cases) {
  if (cases.empty()) throw Error(ErrorCode::kEmptyInput, "avg_pos: no cases");
  double total = 0.0;
  for (const RankingCase& c : cases) total += true_rank(c);
  return total / static_cast<double>(cases.size());
}

RecallReport summarize(std::span<const RankingCase> cases, std::span<const int> ks) {
  if (cases.empty()) throw Error(ErrorCode::kEmptyInput, "summarize: no cases");
  std::size_t min_n = cases.front().scores.size();
  for (const auto& c : cases) min_n = std::min(min_n, c.scores.size());
  RecallReport r;
  r.cases = cases.size();
  for (int k : ks) {
    if (k >= 1 && static_cast<std::size_t>(k) <= min_n) r.recall[k] = recall_at_k(cases, k);
  }
  r.avg_pos = avg_pos(cases);
  return r;
}

Json to_json(const RecallReport& r) {
  Json recall = Json::object();
  for (const auto& [k, v] : r.recall) recall["r_at_" + std::to_string(k)] = v;
  return {{"cases", r.cases}, {"recall", recall}, {"avg_pos", r.avg_pos}};
}

}  // namespace cannedbot::eval
