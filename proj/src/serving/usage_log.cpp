// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/serving/usage_log.hpp"

#include "cannedbot/error.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cannedbot::serving {

namespace {

[[noreturn]] void io_error(const std::string& what, const std::filesystem::path& path) {
  throw Error(ErrorCode::kIo, what + " " + path.string() + ": " + std::strerror(errno));
}

}  // namespace

UsageLog::UsageLog(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.empty()) return;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::string content;
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) io_error("cannot read", path_);
    std::ostringstream ss;
    ss << in.rdbuf();
    content = ss.str();
  }
  const auto last_newline = content.rfind('\n');
  const std::size_t keep = last_newline == std::string::npos ? 0 : last_newline + 1;
  if (keep < content.size()) {
    truncated_bytes_ = content.size() - keep;
    std::filesystem::resize_file(path_, keep);
    content.resize(keep);
  }
  std::size_t line_no = 0;
  std::istringstream lines(content);
  for (std::string line; std::getline(lines, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      index(curation::usage_entry_from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse, path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) io_error("cannot open", path_);
}

UsageLog::~UsageLog() {
  if (fd_ >= 0) ::close(fd_);
}

void UsageLog::index(curation::UsageLogEntry entry) {
  const auto it = by_request_.find(entry.request_id);
  if (it != by_request_.end()) {
    entries_[it->second] = std::move(entry);
    return;
  }
  by_request_.emplace(entry.request_id, entries_.size());
  entries_.push_back(std::move(entry));
}

void UsageLog::append(const curation::UsageLogEntry& entry) {
  curation::validate(entry);
  const std::string line = curation::to_json(entry).dump() + "\n";
  std::lock_guard lock(mu_);
  if (fd_ >= 0) {
    std::size_t written = 0;
    while (written < line.size()) {
      const auto n = ::write(fd_, line.data() + written, line.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        io_error("cannot append to", path_);
      }
      written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) io_error("cannot sync", path_);
  }
  index(entry);
}

std::optional<curation::UsageLogEntry> UsageLog::find(const std::string& request_id) const {
  std::lock_guard lock(mu_);
  const auto it = by_request_.find(request_id);
  if (it == by_request_.end()) return std::nullopt;
  return entries_[it->second];
}

std::vector<curation::UsageLogEntry> UsageLog::by_conversation(const std::string& conversation_id) const {
  std::lock_guard lock(mu_);
  std::vector<curation::UsageLogEntry> out;
  for (const auto& e : entries_) {
    if (e.conversation_id == conversation_id) out.push_back(e);
  }
  return out;
}

std::vector<curation::UsageLogEntry> UsageLog::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t UsageLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

}  // namespace cannedbot::serving
