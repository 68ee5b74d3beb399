// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/curation/usage.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cannedbot::serving {

/// Append-only usage store, one JSON record per line. Every append is
/// written with a single write and fsynced before returning. A later record
/// for the same request_id supersedes the earlier one. An empty path keeps
/// records in memory only.
class UsageLog {
 public:
  /// Opens or creates the log. A trailing record without its newline (an
  /// append interrupted by a crash) is cut off; Parse on any other damage.
  explicit UsageLog(std::filesystem::path path = {});
  ~UsageLog();
  UsageLog(const UsageLog&) = delete;
  UsageLog& operator=(const UsageLog&) = delete;

  void append(const curation::UsageLogEntry& entry);

  std::optional<curation::UsageLogEntry> find(const std::string& request_id) const;
  std::vector<curation::UsageLogEntry> by_conversation(const std::string& conversation_id) const;
  /// Latest record per request, in order of first appearance.
  std::vector<curation::UsageLogEntry> entries() const;
  std::size_t size() const;

  /// Bytes cut off while opening.
  std::size_t truncated_bytes() const { return truncated_bytes_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  void index(curation::UsageLogEntry entry);

  std::filesystem::path path_;
  int fd_ = -1;
  std::size_t truncated_bytes_ = 0;
  mutable std::mutex mu_;
  std::vector<curation::UsageLogEntry> entries_;
  std::map<std::string, std::size_t> by_request_;
};

}  // namespace cannedbot::serving
