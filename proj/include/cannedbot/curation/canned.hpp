// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cannedbot::curation {

struct CannedResponse {
  int id = 0;
  std::string text;
  /// normalize_text(text); the key for matching and filtering.
  std::string normalized;
  std::size_t frequency = 0;
  int cluster_id = -1;

  bool operator==(const CannedResponse&) const = default;
};

/// Ordered canned responses with ids dense in [0, size()). Embeddings live
/// in a separate dump tied to the checkpoint that produced them.
class CannedList {
 public:
  CannedList() = default;
  /// Throws Validation unless ids are 0..n-1 in order; recomputes normalized.
  explicit CannedList(std::vector<CannedResponse> responses);
  static CannedList from_texts(const std::vector<std::string>& texts);

  const std::vector<CannedResponse>& responses() const { return responses_; }
  std::size_t size() const { return responses_.size(); }
  bool empty() const { return responses_.empty(); }
  const CannedResponse& at(int id) const;
  std::vector<std::string> texts() const;

  /// Lowest id whose normalized text equals `normalized`.
  std::optional<int> find_normalized(std::string_view normalized) const;
  /// Appends with the next id and returns it.
  int append(std::string text, std::size_t frequency = 0, int cluster_id = -1);

  bool operator==(const CannedList&) const = default;

 private:
  std::vector<CannedResponse> responses_;
};

/// Line-delimited {id, text, frequency, cluster_id}.
void write_canned_list(const std::filesystem::path& path, const CannedList& list);
CannedList read_canned_list(const std::filesystem::path& path);

}  // namespace cannedbot::curation
