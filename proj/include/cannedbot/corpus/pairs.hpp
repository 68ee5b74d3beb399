// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/corpus/dialogue.hpp"
#include "cannedbot/corpus/vocabulary.hpp"
#include "cannedbot/jsonl.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cannedbot::corpus {

inline constexpr int kDefaultMaxContext = 20;

struct PairOptions {
  int utterance_len = kDefaultUtteranceLen;
  int max_context_utterances = kDefaultMaxContext;
};

/// One training unit: every utterance before an agent turn (most recent
/// max_context_utterances kept) and that agent turn as target.
struct ContextTargetPair {
  std::vector<Utterance> context;
  Utterance target;
  std::string dialogue_id;
  int turn_index = 0;

  bool operator==(const ContextTargetPair&) const = default;
};

/// Tokenizes the normalized text of `u` in place to exactly utterance_len ids.
void tokenize_utterance(Utterance& u, const Vocabulary& vocab, int utterance_len);

/// One pair per agent turn with at least one preceding utterance.
std::vector<ContextTargetPair> make_pairs(const Dialogue& regularized, const Vocabulary& vocab,
                                          const PairOptions& options = {});

std::vector<ContextTargetPair> make_pairs(const std::vector<Dialogue>& regularized,
                                          const Vocabulary& vocab, const PairOptions& options = {});

struct PairSplit {
  std::vector<ContextTargetPair> train;
  std::vector<ContextTargetPair> held_out;
};

/// Holds out every `every`-th dialogue (by order of first appearance,
/// starting with the first) so no dialogue straddles the split. Throws
/// InvalidArgument for every < 2.
PairSplit split_by_dialogue(const std::vector<ContextTargetPair>& pairs, int every);

Json to_json(const ContextTargetPair& p);
/// Throws on missing required fields (dialogue_id, turn_index, context, target).
ContextTargetPair pair_from_json(const Json& j);

/// Line-delimited {dialogue_id, turn_index, context:[[ids]], target:[ids]}
/// plus the optional fields target_text, context_text, target_intent.
void write_pairs(const std::filesystem::path& path, const std::vector<ContextTargetPair>& pairs);
std::vector<ContextTargetPair> read_pairs(const std::filesystem::path& path);

}  // namespace cannedbot::corpus
