// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cannedbot::corpus {

enum class Speaker { kAgent, kCustomer };

std::string_view to_string(Speaker s);
/// Accepts "agent" / "customer"; throws Parse otherwise.
Speaker speaker_from_string(std::string_view s);

struct Utterance {
  Speaker speaker = Speaker::kAgent;
  std::string text;
  /// Padded token ids, present after tokenization.
  std::vector<int> tokens;
  /// Hidden ground-truth intent (synthetic corpora only).
  std::optional<int> intent;

  bool operator==(const Utterance&) const = default;
};

struct Dialogue {
  std::string id;
  std::vector<Utterance> utterances;

  bool operator==(const Dialogue&) const = default;
};

struct RegularizeOptions {
  /// Prepended when a dialogue opens with the customer.
  std::string greeting = "hello how can i help you";
};

/// Normalizes every text, drops utterances that normalize to nothing, merges
/// consecutive same-speaker turns (joined by one space) and prepends the
/// greeting placeholder when the customer speaks first, so the result reads
/// A C A C ... Throws EmptyDialogue when nothing survives normalization.
Dialogue regularize_turns(const Dialogue& d, const RegularizeOptions& options = {});

/// True when speakers alternate starting with the agent.
bool is_regular(const Dialogue& d);

/// Line-delimited {id, utterances:[{speaker, text, intent?}]}.
void write_corpus(const std::filesystem::path& path, const std::vector<Dialogue>& dialogues);
std::vector<Dialogue> read_corpus(const std::filesystem::path& path);

struct CorpusStats {
  std::size_t dialogues = 0;
  std::size_t utterances = 0;
  double words_per_dialogue = 0.0;
  double words_per_agent_utterance = 0.0;
  double words_per_customer_utterance = 0.0;
};

CorpusStats compute_stats(const std::vector<Dialogue>& dialogues);
/// Two-column text table: "# dialogues", "# utterances (in total)", averages.
std::string format_stats(const CorpusStats& stats);

}  // namespace cannedbot::corpus
