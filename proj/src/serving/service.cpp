// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/serving/service.hpp"

#include "cannedbot/corpus/dialogue.hpp"
#include "cannedbot/corpus/text.hpp"
#include "cannedbot/curation/similarity.hpp"
#include "cannedbot/encoder/embedder.hpp"
#include "cannedbot/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

namespace cannedbot::serving {

namespace {

constexpr std::size_t kLatencyWindow = 10000;

[[noreturn]] void malformed(const std::string& why) { throw Error(ErrorCode::kMalformedRequest, why); }

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

SuggestionRequest suggestion_request_from_json(const Json& j) {
  if (!j.is_object()) malformed("request must be an object");
  SuggestionRequest r;
  if (j.contains("conversation_id")) {
    if (!j["conversation_id"].is_string()) malformed("conversation_id must be a string");
    r.conversation_id = j["conversation_id"].get<std::string>();
  }
  if (!j.contains("utterances") || !j["utterances"].is_array()) malformed("utterances must be an array");
  for (const auto& u : j["utterances"]) {
    if (!u.is_object() || !u.contains("speaker") || !u.contains("text") || !u["speaker"].is_string() ||
        !u["text"].is_string()) {
      malformed("every utterance needs string speaker and text");
    }
    corpus::Utterance out;
    try {
      out.speaker = corpus::speaker_from_string(u["speaker"].get<std::string>());
    } catch (const Error&) {
      malformed("unknown speaker '" + u["speaker"].get<std::string>() + "'");
    }
    out.text = u["text"].get<std::string>();
    r.utterances.push_back(std::move(out));
  }
  if (r.utterances.empty()) malformed("utterances is empty");
  return r;
}

Json to_json(const SuggestionRequest& r) {
  Json us = Json::array();
  for (const auto& u : r.utterances) us.push_back({{"speaker", corpus::to_string(u.speaker)}, {"text", u.text}});
  return {{"conversation_id", r.conversation_id}, {"utterances", us}};
}

Json to_json(const SuggestionResponse& r) {
  Json s = Json::array();
  for (const auto& x : r.suggestions) {
    s.push_back({{"canned_id", x.canned_id}, {"text", x.text}, {"confidence", x.confidence}});
  }
  return {{"suggested", r.suggested}, {"suggestions", s}, {"request_id", r.request_id}};
}

SuggestionResponse suggestion_response_from_json(const Json& j) {
  SuggestionResponse r;
  r.suggested = j.at("suggested").get<bool>();
  r.request_id = j.at("request_id").get<std::string>();
  for (const auto& x : j.at("suggestions")) {
    r.suggestions.push_back(
        {x.at("canned_id").get<int>(), x.at("text").get<std::string>(), x.at("confidence").get<double>()});
  }
  return r;
}

UsageReport usage_report_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("request_id") || !j["request_id"].is_string()) {
    malformed("usage report needs a string request_id");
  }
  UsageReport r;
  r.request_id = j["request_id"].get<std::string>();
  if (j.contains("used_canned_id") && !j["used_canned_id"].is_null()) {
    if (!j["used_canned_id"].is_number_integer()) malformed("used_canned_id must be an integer");
    r.used_canned_id = j["used_canned_id"].get<int>();
  }
  return r;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(std::clamp(q, 0.0, 1.0) * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

SuggestionService::SuggestionService(ServiceConfig config, std::shared_ptr<EmbeddingStore> tier1)
    : config_(std::move(config)),
      cache_(tier1 ? std::move(tier1) : std::make_shared<InProcessEmbeddingStore>(config_.tier1_capacity),
             config_.tier2_capacity, config_.cache_enabled),
      usage_(config_.usage_log) {
  if (config_.candidates == 0 || config_.max_suggestions == 0) {
    throw Error(ErrorCode::kInvalidArgument, "candidates and max_suggestions must be positive");
  }
  std::random_device rd;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rd()));
  id_prefix_ = buf;
}

void SuggestionService::load(std::shared_ptr<const objectives::ResponseModel> model, curation::CannedList canned,
                             eval::CannedEmbeddings dump) {
  if (!model) throw Error(ErrorCode::kModelUnavailable, "no model given");
  if (canned.empty()) throw Error(ErrorCode::kEmptyInput, "canned list is empty");
  eval::check_canned_embeddings(*model, canned, dump);
  auto snap = std::make_shared<Snapshot>();
  snap->checkpoint_id = dump.checkpoint_id;
  snap->model = std::move(model);
  snap->canned = std::move(canned);
  snap->dump = std::move(dump);
  std::lock_guard lock(snapshot_mu_);
  snapshot_ = std::move(snap);
  cache_.clear();
}

bool SuggestionService::ready() const { return snapshot() != nullptr; }

std::shared_ptr<const Snapshot> SuggestionService::snapshot() const {
  std::lock_guard lock(snapshot_mu_);
  return snapshot_;
}

std::string SuggestionService::next_request_id() { return id_prefix_ + "-" + std::to_string(next_id_++); }

void SuggestionService::set_threshold(double t) {
  if (!std::isfinite(t)) throw Error(ErrorCode::kInvalidArgument, "threshold must be finite");
  threshold_.store(t);
}

void SuggestionService::reload_threshold(const std::filesystem::path& report) {
  set_threshold(eval::threshold_report_from_json(read_json_file(report)).threshold);
}

SuggestionResponse SuggestionService::suggest(const SuggestionRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  const auto snap = snapshot();
  if (!snap) throw Error(ErrorCode::kModelUnavailable, "no model loaded");
  if (request.utterances.empty()) malformed("utterances is empty");

  corpus::Dialogue d;
  d.id = request.conversation_id;
  d.utterances = request.utterances;
  corpus::Dialogue regular;
  try {
    regular = corpus::regularize_turns(d);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptyDialogue) malformed("no utterance has text once normalized");
    throw;
  }
  const auto& all = regular.utterances;

  std::set<std::string> recent_agent;
  std::size_t agent_turns = 0;
  for (auto it = all.rbegin(); it != all.rend() && agent_turns < config_.recent_agent_turns; ++it) {
    if (it->speaker != corpus::Speaker::kAgent) continue;
    recent_agent.insert(corpus::normalize_text(it->text));
    ++agent_turns;
  }

  const auto& model = *snap->model;
  const auto max_ctx = static_cast<std::size_t>(model.config().max_context_utterances);
  const std::size_t first = all.size() > max_ctx ? all.size() - max_ctx : 0;
  std::vector<Vector> embeddings;
  embeddings.reserve(all.size() - first);
  for (std::size_t i = first; i < all.size(); ++i) embeddings.push_back(cache_.embed(all[i].text, model));
  const Vector context = model.context_embedding(embeddings);

  auto ranked = eval::rank_checked(model, context, snap->dump);
  ranked.resize(std::min(ranked.size(), config_.candidates));
  std::erase_if(ranked, [&](const eval::RankedResponse& r) {
    return recent_agent.count(snap->canned.at(r.canned_id).normalized) != 0;
  });

  SuggestionResponse response;
  response.request_id = next_request_id();
  const double gate = threshold();
  if (!ranked.empty() && ranked.front().confidence >= gate) {
    response.suggested = true;
    for (std::size_t i = 0; i < ranked.size() && i < config_.max_suggestions; ++i) {
      const auto& r = ranked[i];
      response.suggestions.push_back({r.canned_id, snap->canned.at(r.canned_id).text, r.confidence});
    }
  }

  curation::UsageLogEntry entry;
  entry.request_id = response.request_id;
  entry.conversation_id = request.conversation_id;
  entry.timestamp_ms = now_ms();
  for (const auto& s : response.suggestions) entry.shown.push_back({s.canned_id, s.confidence});
  entry.checkpoint_id = snap->checkpoint_id;
  entry.context.assign(all.begin() + static_cast<std::ptrdiff_t>(first), all.end());
  usage_.append(entry);

  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  record_latency(ms, response.suggested);
  return response;
}

curation::UsageLogEntry SuggestionService::log_usage(const UsageReport& report) {
  auto entry = usage_.find(report.request_id);
  if (!entry) throw Error(ErrorCode::kUnknownRequestId, "request '" + report.request_id + "' was not issued here");
  entry->used_canned_id = report.used_canned_id;
  entry->reported = true;
  curation::validate(*entry);
  entry->timestamp_ms = now_ms();
  usage_.append(*entry);
  return *entry;
}

curation::CannedResponse SuggestionService::extend(std::string_view text) {
  std::lock_guard guard(extend_mu_);
  const auto snap = snapshot();
  if (!snap) throw Error(ErrorCode::kModelUnavailable, "no model loaded");
  const auto& model = *snap->model;
  if (model.objective() != objectives::Objective::kContrastive) {
    throw Error(ErrorCode::kObjectiveNotExtensible,
                std::string(objectives::to_string(model.objective())) +
                    " models score a fixed response set; extending it needs retraining");
  }
  const std::string normalized = corpus::normalize_text(text);
  if (normalized.empty()) throw Error(ErrorCode::kEmptyInput, "response is empty once normalized");

  const encoder::MatchingEmbedder embedder(model.encoder(), model.params(), model.vocab());
  for (const auto& r : snap->canned.responses()) {
    const auto sim = curation::classify_similar(text, r.text, embedder, config_.dedup_threshold);
    if (sim.label == curation::SimilarityLabel::kSimilar) {
      throw Error(ErrorCode::kDuplicateResponse,
                  "too close to canned response " + std::to_string(r.id) + " (cosine " + std::to_string(sim.score) + ")");
    }
  }

  auto next = std::make_shared<Snapshot>(*snap);
  const int id = next->canned.append(std::string(text));
  const auto rows = next->dump.embeddings.rows();
  next->dump.embeddings.conservativeResize(rows + 1, Eigen::NoChange);
  next->dump.embeddings.row(rows) = model.target_embedding(text);
  if (!config_.canned_path.empty()) curation::write_canned_list(config_.canned_path, next->canned);
  if (!config_.embeddings_path.empty()) eval::save_canned_embeddings(config_.embeddings_path, next->dump);
  const auto added = next->canned.at(id);
  {
    std::lock_guard lock(snapshot_mu_);
    snapshot_ = std::move(next);
  }
  return added;
}

void SuggestionService::record_latency(double ms, bool suggested) {
  std::lock_guard lock(stats_mu_);
  ++requests_;
  suggested_ += suggested ? 1 : 0;
  latencies_ms_.push_back(ms);
  if (latencies_ms_.size() > kLatencyWindow) latencies_ms_.pop_front();
}

Json SuggestionService::metrics() const {
  const auto c = cache_.stats();
  Json j;
  {
    std::lock_guard lock(stats_mu_);
    const std::vector<double> lat(latencies_ms_.begin(), latencies_ms_.end());
    j["requests"] = requests_;
    j["suggested"] = suggested_;
    j["suggestion_rate"] = requests_ == 0 ? 0.0 : static_cast<double>(suggested_) / static_cast<double>(requests_);
    j["latency_ms"] = {{"p50", percentile(lat, 0.5)}, {"p95", percentile(lat, 0.95)}, {"samples", lat.size()}};
  }
  j["cache"] = {{"enabled", cache_.enabled()},
                {"tier1_hits", c.tier1_hits},
                {"tier1_misses", c.tier1_misses},
                {"tier1_hit_rate", c.tier1_hit_rate()},
                {"tier2_hits", c.tier2_hits},
                {"tier2_misses", c.tier2_misses},
                {"tier2_hit_rate", c.tier2_hit_rate()},
                {"computations", c.computations}};
  j["threshold"] = threshold();
  j["usage_entries"] = usage_.size();
  if (const auto snap = snapshot()) {
    j["checkpoint_id"] = snap->checkpoint_id;
    j["canned"] = snap->canned.size();
    j["objective"] = objectives::to_string(snap->model->objective());
  }
  return j;
}

}  // namespace cannedbot::serving
