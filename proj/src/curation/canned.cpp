// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/curation/canned.hpp"

#include "cannedbot/corpus/text.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/jsonl.hpp"

namespace cannedbot::curation {

CannedList::CannedList(std::vector<CannedResponse> responses) : responses_(std::move(responses)) {
  for (std::size_t i = 0; i < responses_.size(); ++i) {
    CannedResponse& r = responses_[i];
    if (r.id != static_cast<int>(i)) {
      throw Error(ErrorCode::kValidation, "canned ids must be dense and ordered: position " + std::to_string(i) +
                                              " has id " + std::to_string(r.id));
    }
    r.normalized = corpus::normalize_text(r.text);
    if (r.normalized.empty()) throw Error(ErrorCode::kValidation, "canned response " + std::to_string(i) + " is empty");
  }
}

CannedList CannedList::from_texts(const std::vector<std::string>& texts) {
  CannedList list;
  for (const auto& t : texts) list.append(t);
  return list;
}

const CannedResponse& CannedList::at(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= responses_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "canned id " + std::to_string(id) + " out of range");
  }
  return responses_[static_cast<std::size_t>(id)];
}

std::vector<std::string> CannedList::texts() const {
  std::vector<std::string> out;
  out.reserve(responses_.size());
  for (const auto& r : responses_) out.push_back(r.text);
  return out;
}

std::optional<int> CannedList::find_normalized(std::string_view normalized) const {
  for (const auto& r : responses_) {
    if (r.normalized == normalized) return r.id;
  }
  return std::nullopt;
}

int CannedList::append(std::string text, std::size_t frequency, int cluster_id) {
  CannedResponse r;
  r.id = static_cast<int>(responses_.size());
  r.normalized = corpus::normalize_text(text);
  if (r.normalized.empty()) throw Error(ErrorCode::kValidation, "canned response text is empty");
  r.text = std::move(text);
  r.frequency = frequency;
  r.cluster_id = cluster_id;
  responses_.push_back(std::move(r));
  return responses_.back().id;
}

void write_canned_list(const std::filesystem::path& path, const CannedList& list) {
  std::vector<Json> records;
  for (const auto& r : list.responses()) {
    records.push_back({{"id", r.id}, {"text", r.text}, {"frequency", r.frequency}, {"cluster_id", r.cluster_id}});
  }
  write_jsonl(path, records);
}

CannedList read_canned_list(const std::filesystem::path& path) {
  std::vector<CannedResponse> responses;
  read_jsonl(path, [&](const Json& j) {
    CannedResponse r;
    r.id = j.at("id").get<int>();
    r.text = j.at("text").get<std::string>();
    r.frequency = j.value("frequency", std::size_t{0});
    r.cluster_id = j.value("cluster_id", -1);
    responses.push_back(std::move(r));
  });
  return CannedList(std::move(responses));
}

}  // namespace cannedbot::curation
