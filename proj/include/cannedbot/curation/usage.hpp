// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/corpus/dialogue.hpp"
#include "cannedbot/jsonl.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cannedbot::curation {

struct ShownSuggestion {
  int canned_id = 0;
  double confidence = 0.0;

  bool operator==(const ShownSuggestion&) const = default;
};

/// One suggestion request and, once reported, what the agent did with it.
struct UsageLogEntry {
  std::string request_id;
  std::string conversation_id;
  std::int64_t timestamp_ms = 0;
  std::vector<ShownSuggestion> shown;
  std::optional<int> used_canned_id;
  std::string checkpoint_id;
  /// The context the suggestions were computed from, oldest first.
  std::vector<corpus::Utterance> context;
  /// Whether a usage report arrived; unreported entries carry no signal.
  bool reported = false;

  bool operator==(const UsageLogEntry&) const = default;
};

/// Throws Validation when used_canned_id is present but not shown.
void validate(const UsageLogEntry& e);

Json to_json(const UsageLogEntry& e);
/// Throws Validation on missing fields or a broken invariant.
UsageLogEntry usage_entry_from_json(const Json& j);

/// One record per line, as exported by the service.
void write_usage_entries(const std::filesystem::path& path, const std::vector<UsageLogEntry>& entries);
std::vector<UsageLogEntry> read_usage_entries(const std::filesystem::path& path);

}  // namespace cannedbot::curation
