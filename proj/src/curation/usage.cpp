// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/curation/usage.hpp"

#include "cannedbot/error.hpp"

#include <algorithm>

namespace cannedbot::curation {

void validate(const UsageLogEntry& e) {
  if (e.request_id.empty()) throw Error(ErrorCode::kValidation, "usage entry without request_id");
  if (e.used_canned_id) {
    const bool shown = std::any_of(e.shown.begin(), e.shown.end(),
                                   [&](const ShownSuggestion& s) { return s.canned_id == *e.used_canned_id; });
    if (!shown) {
      throw Error(ErrorCode::kValidation, "used canned id " + std::to_string(*e.used_canned_id) +
                                              " was not shown for request " + e.request_id);
    }
  }
}

Json to_json(const UsageLogEntry& e) {
  Json shown = Json::array();
  for (const auto& s : e.shown) shown.push_back({{"canned_id", s.canned_id}, {"confidence", s.confidence}});
  Json context = Json::array();
  for (const auto& u : e.context) context.push_back({{"speaker", corpus::to_string(u.speaker)}, {"text", u.text}});
  return {{"request_id", e.request_id},
          {"conversation_id", e.conversation_id},
          {"timestamp_ms", e.timestamp_ms},
          {"shown", std::move(shown)},
          {"used_canned_id", e.used_canned_id ? Json(*e.used_canned_id) : Json(nullptr)},
          {"checkpoint_id", e.checkpoint_id},
          {"context", std::move(context)},
          {"reported", e.reported}};
}

UsageLogEntry usage_entry_from_json(const Json& j) {
  UsageLogEntry e;
  try {
    e.request_id = j.at("request_id").get<std::string>();
    e.conversation_id = j.value("conversation_id", std::string());
    e.timestamp_ms = j.value("timestamp_ms", std::int64_t{0});
    for (const Json& s : j.at("shown")) {
      e.shown.push_back({s.at("canned_id").get<int>(), s.at("confidence").get<double>()});
    }
    if (j.contains("used_canned_id") && !j["used_canned_id"].is_null()) e.used_canned_id = j["used_canned_id"].get<int>();
    e.checkpoint_id = j.value("checkpoint_id", std::string());
    if (j.contains("context")) {
      for (const Json& u : j["context"]) {
        corpus::Utterance utt;
        utt.speaker = corpus::speaker_from_string(u.at("speaker").get<std::string>());
        utt.text = u.at("text").get<std::string>();
        e.context.push_back(std::move(utt));
      }
    }
    e.reported = j.value("reported", e.used_canned_id.has_value());
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::kValidation, std::string("bad usage entry: ") + ex.what());
  }
  validate(e);
  return e;
}

void write_usage_entries(const std::filesystem::path& path, const std::vector<UsageLogEntry>& entries) {
  std::vector<Json> records;
  for (const auto& e : entries) {
    validate(e);
    records.push_back(to_json(e));
  }
  write_jsonl(path, records);
}

std::vector<UsageLogEntry> read_usage_entries(const std::filesystem::path& path) {
  std::vector<UsageLogEntry> out;
  read_jsonl(path, [&](const Json& j) { out.push_back(usage_entry_from_json(j)); });
  return out;
}

}  // namespace cannedbot::curation
