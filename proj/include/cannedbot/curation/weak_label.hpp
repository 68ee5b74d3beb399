// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/corpus/pairs.hpp"
#include "cannedbot/curation/canned.hpp"
#include "cannedbot/curation/similarity.hpp"
#include "cannedbot/curation/usage.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cannedbot::curation {

enum class LabelSource { kExactMatch, kFuzzyMatch, kUsageLog };
enum class Polarity { kPositive, kNegative };
enum class NegativeStrategy { kWrongTarget, kNoMatchContext, kRejectedSuggestion };

std::string_view to_string(LabelSource s);
std::string_view to_string(Polarity p);
std::string_view to_string(NegativeStrategy s);
LabelSource label_source_from_string(std::string_view s);
Polarity polarity_from_string(std::string_view s);
NegativeStrategy negative_strategy_from_string(std::string_view s);

/// Positives carry a source, negatives a strategy.
struct WeakLabel {
  corpus::ContextTargetPair pair;
  int canned_id = 0;
  Polarity polarity = Polarity::kPositive;
  std::optional<LabelSource> source;
  std::optional<NegativeStrategy> strategy;
  /// Similarity behind the label: 1 for exact matches, the cosine otherwise.
  double score = 1.0;
};

/// Throws Validation when the source/strategy invariant is broken.
void validate(const WeakLabel& w);

/// Normalized context texts joined by newlines; the identity of a context.
std::string context_key(const corpus::ContextTargetPair& pair);

/// Positive/ExactMatch for every pair whose normalized target equals a
/// canned normalized text (digits are masked on both sides).
std::vector<WeakLabel> exact_match_positives(const std::vector<corpus::ContextTargetPair>& pairs,
                                             const CannedList& canned);

struct FuzzyOptions {
  double threshold = kDefaultSimilarityThreshold;
  /// Also label targets that match exactly (score 1); by default those are
  /// left to exact matching.
  bool include_exact = false;
};

/// Positive/FuzzyMatch with the most similar canned response when its
/// cosine reaches the threshold; ties go to the lowest canned id.
std::vector<WeakLabel> fuzzy_match_positives(const std::vector<corpus::ContextTargetPair>& pairs,
                                             const CannedList& canned, const encoder::UtteranceEmbedder& embedder,
                                             const FuzzyOptions& options = {});

struct NegativeOptions {
  double threshold = kDefaultSimilarityThreshold;
  /// WrongTarget negatives per positive.
  double wrong_target_ratio = 1.0;
  /// NoMatchContext negatives per positive, spread over unmatched contexts.
  double no_match_ratio = 0.5;
  /// Fraction of unused shown suggestion sets turned into negatives.
  double usage_sample_rate = 0.25;
  std::uint64_t seed = 1;
};

/// Quota of a strategy: round(ratio * positives).
std::size_t negative_quota(double ratio, std::size_t positives);

/// WrongTarget: a positive's context with a random canned response whose
/// similarity to the true target is below the threshold. NoMatchContext:
/// contexts whose target matches no canned response (best similarity below
/// the threshold) with a random canned response. RejectedSuggestion: every
/// shown id of a sampled usage entry reported with nothing used. No emitted
/// negative shares (context, canned_id) with a positive.
std::vector<WeakLabel> build_negative_dataset(const std::vector<WeakLabel>& positives,
                                              const std::vector<corpus::ContextTargetPair>& pairs,
                                              const CannedList& canned, const encoder::UtteranceEmbedder& embedder,
                                              const std::vector<UsageLogEntry>& usage,
                                              const NegativeOptions& options = {});

/// Positive/UsageLog for every reported entry whose suggestion was used.
std::vector<WeakLabel> usage_positives(const std::vector<UsageLogEntry>& usage, const CannedList& canned);

/// Drops negatives whose (context, canned_id) is also labelled positive.
std::vector<WeakLabel> resolve_conflicts(std::vector<WeakLabel> labels);

Json to_json(const WeakLabel& w);
WeakLabel weak_label_from_json(const Json& j);
void write_weak_labels(const std::filesystem::path& path, const std::vector<WeakLabel>& labels);
std::vector<WeakLabel> read_weak_labels(const std::filesystem::path& path);

}  // namespace cannedbot::curation
