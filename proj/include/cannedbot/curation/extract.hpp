// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/corpus/dialogue.hpp"
#include "cannedbot/curation/canned.hpp"
#include "cannedbot/curation/similarity.hpp"

namespace cannedbot::curation {

struct ExtractOptions {
  std::size_t top_n = 10000;
  int k = 200;
  std::uint64_t seed = 1;
  int max_iter = 100;
  double dedup_threshold = kDefaultSimilarityThreshold;
};

/// Agent utterances by normalized text with counts, most frequent first
/// (ties by text). The surface form kept is the most frequent raw variant.
struct UtteranceCount {
  std::string text;
  std::string normalized;
  std::size_t count = 0;
};
std::vector<UtteranceCount> count_agent_utterances(const std::vector<corpus::Dialogue>& dialogues);

/// Embeds the top_n agent utterances, clusters them into k groups and keeps
/// the member nearest each centroid. Representatives are ordered by cluster
/// frequency (descending), then deduplicated: one similar to an earlier kept
/// response is dropped. Throws TooFewUniqueUtterances when fewer than k
/// distinct agent utterances are available.
CannedList extract_canned_list(const std::vector<corpus::Dialogue>& dialogues,
                               const encoder::UtteranceEmbedder& embedder, const ExtractOptions& options = {});

}  // namespace cannedbot::curation
