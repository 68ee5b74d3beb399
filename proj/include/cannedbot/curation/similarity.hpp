// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/corpus/dialogue.hpp"
#include "cannedbot/encoder/embedder.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cannedbot::curation {

using numerics::Vector;

/// Fuzzy-match and dedup threshold on cosine similarity.
inline constexpr double kDefaultSimilarityThreshold = 0.9;

enum class SimilarityLabel { kSimilar, kUnique };
std::string_view to_string(SimilarityLabel label);
SimilarityLabel similarity_label_from_string(std::string_view s);

struct SimilarityPair {
  std::string a;
  std::string b;
  SimilarityLabel label = SimilarityLabel::kUnique;
  double score = 0.0;
};

/// Cosine similarity clamped to [-1, 1]; 0 when either vector is zero.
double cosine_similarity(const Vector& a, const Vector& b);

struct SimilarityResult {
  double score = 0.0;
  SimilarityLabel label = SimilarityLabel::kUnique;
};

/// Similar iff the embedding cosine reaches `threshold`. Texts that are
/// equal after normalization score exactly 1.
SimilarityResult classify_similar(std::string_view a, std::string_view b,
                                  const encoder::UtteranceEmbedder& embedder,
                                  double threshold = kDefaultSimilarityThreshold);

struct SimilarityDatasetOptions {
  std::size_t n_similar = 3000;
  std::size_t n_unique = 10000;
  std::uint64_t seed = 1;
  /// Similar candidates are the top fraction of randomly drawn cross-dialogue
  /// agent-utterance pairs by cosine.
  double similar_top_fraction = 0.05;
};

/// Unique pairs join agent utterances from different thirds (by turn index)
/// of one dialogue; dialogues with agent turns in fewer than two thirds are
/// skipped. Pairs whose texts normalize identically are never Unique.
/// Similar pairs are the highest-cosine cross-dialogue candidates.
std::vector<SimilarityPair> generate_similarity_dataset(const std::vector<corpus::Dialogue>& dialogues,
                                                        const encoder::UtteranceEmbedder& embedder,
                                                        const SimilarityDatasetOptions& options = {});

/// Third (0, 1, 2) of turn `index` in a dialogue of `n` turns.
int dialogue_third(std::size_t index, std::size_t n);

struct RocPoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

struct RocResult {
  /// From (0, 0) at threshold +inf to (1, 1), one point per distinct score.
  std::vector<RocPoint> curve;
  double auc = 0.0;
};

/// (score, is_positive) pairs. AUC is the probability a random positive
/// outscores a random negative, ties counted half. Throws SingleClass when
/// either class is absent.
RocResult roc_auc(std::span<const std::pair<double, bool>> scored);

/// Threshold maximizing tpr - fpr (lowest threshold on ties).
double youden_threshold(const RocResult& roc);

}  // namespace cannedbot::curation
