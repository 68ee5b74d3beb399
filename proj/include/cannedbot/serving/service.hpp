// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/curation/canned.hpp"
#include "cannedbot/curation/similarity.hpp"
#include "cannedbot/eval/calibration.hpp"
#include "cannedbot/eval/ranking.hpp"
#include "cannedbot/serving/cache.hpp"
#include "cannedbot/serving/usage_log.hpp"

#include <atomic>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cannedbot::serving {

struct ServiceConfig {
  std::size_t tier1_capacity = 100000;
  std::size_t tier2_capacity = 10000;
  bool cache_enabled = true;
  /// Ranked candidates considered before filtering and gating.
  std::size_t candidates = 10;
  /// Agent turns a suggestion must not repeat.
  std::size_t recent_agent_turns = 3;
  std::size_t max_suggestions = 3;
  double dedup_threshold = curation::kDefaultSimilarityThreshold;
  /// Empty keeps usage records in memory only.
  std::filesystem::path usage_log;
  /// When set, extensions are written back to these files.
  std::filesystem::path canned_path;
  std::filesystem::path embeddings_path;
};

struct SuggestionRequest {
  std::string conversation_id;
  /// Oldest first; the last entry is the newest turn.
  std::vector<corpus::Utterance> utterances;
};

/// Throws MalformedRequest on missing fields, an empty utterance list or an
/// unknown speaker.
SuggestionRequest suggestion_request_from_json(const Json& j);
Json to_json(const SuggestionRequest& r);

struct Suggestion {
  int canned_id = 0;
  std::string text;
  double confidence = 0.0;

  bool operator==(const Suggestion&) const = default;
};

/// suggestions is empty iff suggested is false, holds at most
/// max_suggestions entries and is sorted by confidence descending.
struct SuggestionResponse {
  bool suggested = false;
  std::vector<Suggestion> suggestions;
  std::string request_id;
};

Json to_json(const SuggestionResponse& r);
SuggestionResponse suggestion_response_from_json(const Json& j);

/// What the console did with one response.
struct UsageReport {
  std::string request_id;
  std::optional<int> used_canned_id;
};

/// Accepts a full UsageLogEntry record or just {request_id, used_canned_id?}.
UsageReport usage_report_from_json(const Json& j);

/// Model, canned list and embeddings that are served together. Immutable
/// once published.
struct Snapshot {
  std::shared_ptr<const objectives::ResponseModel> model;
  curation::CannedList canned;
  eval::CannedEmbeddings dump;
  std::string checkpoint_id;
};

/// The suggestion pipeline. Safe for concurrent use: requests rank against
/// the snapshot current when they start, extensions and reloads publish a
/// new snapshot, and usage records go through one serialized appender.
class SuggestionService {
 public:
  explicit SuggestionService(ServiceConfig config = {}, std::shared_ptr<EmbeddingStore> tier1 = nullptr);

  /// Validates the dump against the model (ChecksumMismatch,
  /// ClassCountMismatch), publishes the snapshot and drops cached embeddings.
  void load(std::shared_ptr<const objectives::ResponseModel> model, curation::CannedList canned,
            eval::CannedEmbeddings dump);
  bool ready() const;
  std::shared_ptr<const Snapshot> snapshot() const;

  /// Throws MalformedRequest for a request with nothing to rank and
  /// ModelUnavailable before load. The shown side is logged before return.
  SuggestionResponse suggest(const SuggestionRequest& request);

  /// Records what was used. Throws UnknownRequestId for ids this service did
  /// not issue and Validation when the used id was not shown.
  curation::UsageLogEntry log_usage(const UsageReport& report);

  /// Appends a response without retraining. Throws ObjectiveNotExtensible
  /// unless the model is contrastive, DuplicateResponse when the text is
  /// within dedup_threshold of an existing response, EmptyInput for text
  /// that normalizes to nothing.
  curation::CannedResponse extend(std::string_view text);

  double threshold() const { return threshold_.load(); }
  void set_threshold(double t);
  /// Reads the threshold from a calibration report file.
  void reload_threshold(const std::filesystem::path& report);

  const UsageLog& usage_log() const { return usage_; }
  EmbeddingCache& cache() { return cache_; }
  const ServiceConfig& config() const { return config_; }

  /// Request counts, suggestion rate, cache hit rates and latency percentiles.
  Json metrics() const;

 private:
  std::string next_request_id();
  void record_latency(double ms, bool suggested);

  ServiceConfig config_;
  EmbeddingCache cache_;
  UsageLog usage_;
  std::atomic<double> threshold_{0.0};

  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const Snapshot> snapshot_;
  std::mutex extend_mu_;

  std::string id_prefix_;
  std::atomic<std::uint64_t> next_id_{0};

  mutable std::mutex stats_mu_;
  std::uint64_t requests_ = 0;
  std::uint64_t suggested_ = 0;
  std::deque<double> latencies_ms_;
};

/// Nearest-rank percentile of `values` (q in [0, 1]); 0 when empty.
double percentile(std::vector<double> values, double q);

}  // namespace cannedbot::serving
