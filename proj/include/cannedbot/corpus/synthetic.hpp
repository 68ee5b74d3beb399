// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/corpus/dialogue.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cannedbot::corpus {

/// Intent ids 0..3 are the conversational scaffolding every dialogue uses;
/// topic intents (action x object) start at kFirstTopicIntent.
inline constexpr int kGreetingIntent = 0;
inline constexpr int kVerifyIntent = 1;
inline constexpr int kClosingIntent = 2;
inline constexpr int kGoodbyeIntent = 3;
inline constexpr int kFirstTopicIntent = 4;
inline constexpr int kMaxSyntheticIntents = kFirstTopicIntent + 64;

struct SyntheticSpec {
  int n_intents = 20;
  int n_dialogues = 500;
  /// Probability that an utterance is perturbed (paraphrase, filler, dropped
  /// word, or typo). At 0 every agent turn is its intent's template verbatim.
  double noise = 0.0;
  std::uint64_t seed = 7;
  int max_topics_per_dialogue = 3;
};

struct SyntheticIntent {
  int id = 0;
  std::string name;
  /// Canonical agent wording, the canned response this intent stands for.
  std::string template_text;
  /// Alternative agent wordings used by paraphrase noise.
  std::vector<std::string> paraphrases;
  bool topic = false;
};

struct SyntheticCorpus {
  std::vector<Dialogue> dialogues;
  std::vector<SyntheticIntent> intents;
  CorpusStats stats;
};

/// The first n_intents entries of the fixed intent catalogue. Throws
/// InvalidSpec outside [kFirstTopicIntent + 1, kMaxSyntheticIntents].
std::vector<SyntheticIntent> synthetic_intents(int n_intents);

/// Regular (A C A C ...) dialogues; every agent utterance carries its intent id.
/// Byte-identical output for a fixed spec. Throws InvalidSpec for zero
/// intents or dialogues, too few intents for the scaffolding, or noise
/// outside [0, 1].
SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec);

/// Dialogues in which no agent turn carries `intent`.
std::vector<Dialogue> without_intent(const std::vector<Dialogue>& dialogues, int intent);
/// Dialogues in which some agent turn carries `intent`.
std::vector<Dialogue> with_intent(const std::vector<Dialogue>& dialogues, int intent);

}  // namespace cannedbot::corpus
