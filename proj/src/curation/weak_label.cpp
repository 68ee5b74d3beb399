// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/curation/weak_label.hpp"

#include "cannedbot/corpus/text.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/jsonl.hpp"
#include "cannedbot/numerics/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cannedbot::curation {

using numerics::Tensor;

std::string_view to_string(LabelSource s) {
  switch (s) {
    case LabelSource::kExactMatch: return "exact_match";
    case LabelSource::kFuzzyMatch: return "fuzzy_match";
    case LabelSource::kUsageLog: return "usage_log";
  }
  return "?";
}

std::string_view to_string(Polarity p) { return p == Polarity::kPositive ? "positive" : "negative"; }

std::string_view to_string(NegativeStrategy s) {
  switch (s) {
    case NegativeStrategy::kWrongTarget: return "wrong_target";
    case NegativeStrategy::kNoMatchContext: return "no_match_context";
    case NegativeStrategy::kRejectedSuggestion: return "rejected_suggestion";
  }
  return "?";
}

LabelSource label_source_from_string(std::string_view s) {
  for (auto v : {LabelSource::kExactMatch, LabelSource::kFuzzyMatch, LabelSource::kUsageLog}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorCode::kValidation, "unknown label source: " + std::string(s));
}

Polarity polarity_from_string(std::string_view s) {
  if (s == "positive") return Polarity::kPositive;
  if (s == "negative") return Polarity::kNegative;
  throw Error(ErrorCode::kValidation, "unknown polarity: " + std::string(s));
}

NegativeStrategy negative_strategy_from_string(std::string_view s) {
  for (auto v : {NegativeStrategy::kWrongTarget, NegativeStrategy::kNoMatchContext,
                 NegativeStrategy::kRejectedSuggestion}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorCode::kValidation, "unknown negative strategy: " + std::string(s));
}

void validate(const WeakLabel& w) {
  if (w.polarity == Polarity::kPositive && (!w.source || w.strategy)) {
    throw Error(ErrorCode::kValidation, "positive weak label needs a source and no strategy");
  }
  if (w.polarity == Polarity::kNegative && !w.strategy) {
    throw Error(ErrorCode::kValidation, "negative weak label needs a strategy");
  }
  if (w.canned_id < 0) throw Error(ErrorCode::kValidation, "negative canned id");
}

std::string context_key(const corpus::ContextTargetPair& pair) {
  std::string key;
  for (const auto& u : pair.context) {
    key += corpus::normalize_text(u.text);
    key.push_back('\n');
  }
  return key;
}

std::vector<WeakLabel> exact_match_positives(const std::vector<corpus::ContextTargetPair>& pairs,
                                             const CannedList& canned) {
  std::vector<WeakLabel> out;
  for (const auto& p : pairs) {
    if (const auto id = canned.find_normalized(corpus::normalize_text(p.target.text))) {
      out.push_back({p, *id, Polarity::kPositive, LabelSource::kExactMatch, std::nullopt, 1.0});
    }
  }
  return out;
}

namespace {

struct BestMatch {
  int id = -1;
  double score = -2.0;
};

/// Most similar canned response; exact normalized equality scores 1.
BestMatch best_canned(const std::string& normalized, const Vector& embedding, const CannedList& canned,
                      const Tensor& canned_embeddings) {
  BestMatch best;
  for (const auto& r : canned.responses()) {
    const double s = r.normalized == normalized
                         ? 1.0
                         : cosine_similarity(embedding, canned_embeddings.row(r.id));
    if (s > best.score) best = {r.id, s};
  }
  return best;
}

Tensor embed_canned(const CannedList& canned, const encoder::UtteranceEmbedder& embedder) {
  std::vector<std::string> texts;
  for (const auto& r : canned.responses()) texts.push_back(r.normalized);
  return embedder.embed_all(texts);
}

}  // namespace

std::vector<WeakLabel> fuzzy_match_positives(const std::vector<corpus::ContextTargetPair>& pairs,
                                             const CannedList& canned, const encoder::UtteranceEmbedder& embedder,
                                             const FuzzyOptions& options) {
  std::vector<WeakLabel> out;
  if (canned.empty()) return out;
  const Tensor canned_embeddings = embed_canned(canned, embedder);
  for (const auto& p : pairs) {
    const std::string norm = corpus::normalize_text(p.target.text);
    if (!options.include_exact && canned.find_normalized(norm)) continue;
    const BestMatch m = best_canned(norm, embedder.embed(norm), canned, canned_embeddings);
    if (m.score >= options.threshold) {
      out.push_back({p, m.id, Polarity::kPositive, LabelSource::kFuzzyMatch, std::nullopt, m.score});
    }
  }
  return out;
}

std::size_t negative_quota(double ratio, std::size_t positives) {
  if (ratio < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative ratio must be >= 0");
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(positives)));
}

std::vector<WeakLabel> build_negative_dataset(const std::vector<WeakLabel>& positives,
                                              const std::vector<corpus::ContextTargetPair>& pairs,
                                              const CannedList& canned, const encoder::UtteranceEmbedder& embedder,
                                              const std::vector<UsageLogEntry>& usage,
                                              const NegativeOptions& options) {
  if (!(options.usage_sample_rate >= 0.0 && options.usage_sample_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "usage_sample_rate must be in [0, 1]");
  }
  std::vector<WeakLabel> out;
  if (canned.empty()) return out;
  numerics::Rng rng(options.seed);
  const Tensor canned_embeddings = embed_canned(canned, embedder);
  const int n_canned = static_cast<int>(canned.size());

  std::set<std::pair<std::string, int>> positive_keys;
  for (const auto& w : positives) positive_keys.insert({context_key(w.pair), w.canned_id});
  std::set<std::pair<std::string, int>> emitted;
  auto emit = [&](const corpus::ContextTargetPair& pair, int id, NegativeStrategy s, double score) {
    auto key = std::make_pair(context_key(pair), id);
    if (positive_keys.count(key) || !emitted.insert(key).second) return false;
    out.push_back({pair, id, Polarity::kNegative, std::nullopt, s, score});
    return true;
  };

  // WrongTarget: cycle over positives, each drawing a canned response dissimilar to its target.
  const std::size_t wrong_quota = negative_quota(options.wrong_target_ratio, positives.size());
  std::size_t wrong = 0;
  for (std::size_t attempt = 0; wrong < wrong_quota && attempt < wrong_quota * 4 && !positives.empty(); ++attempt) {
    const WeakLabel& pos = positives[attempt % positives.size()];
    const Vector target = embedder.embed(pos.pair.target.text.empty() ? canned.at(pos.canned_id).text
                                                                      : pos.pair.target.text);
    std::vector<int> candidates;
    for (int id = 0; id < n_canned; ++id) {
      if (id != pos.canned_id && cosine_similarity(target, canned_embeddings.row(id)) < options.threshold) {
        candidates.push_back(id);
      }
    }
    if (candidates.empty()) continue;
    const int id = candidates[rng.index(candidates.size())];
    if (emit(pos.pair, id, NegativeStrategy::kWrongTarget, cosine_similarity(target, canned_embeddings.row(id)))) {
      ++wrong;
    }
  }

  // NoMatchContext: contexts whose true reply is far from every canned response.
  std::vector<const corpus::ContextTargetPair*> unmatched;
  for (const auto& p : pairs) {
    const std::string norm = corpus::normalize_text(p.target.text);
    if (norm.empty()) continue;
    const BestMatch m = best_canned(norm, embedder.embed(norm), canned, canned_embeddings);
    if (m.score < options.threshold) unmatched.push_back(&p);
  }
  const std::size_t no_match_quota = negative_quota(options.no_match_ratio, positives.size());
  std::size_t no_match = 0;
  for (std::size_t attempt = 0; no_match < no_match_quota && attempt < no_match_quota * 4 && !unmatched.empty();
       ++attempt) {
    const auto& pair = *unmatched[attempt % unmatched.size()];
    const int id = static_cast<int>(rng.index(static_cast<std::size_t>(n_canned)));
    if (emit(pair, id, NegativeStrategy::kNoMatchContext, 0.0)) ++no_match;
  }

  // RejectedSuggestion: sampled usage entries reported with nothing used.
  for (const auto& e : usage) {
    if (!e.reported || e.used_canned_id || e.shown.empty()) continue;
    if (!rng.bernoulli(options.usage_sample_rate)) continue;
    corpus::ContextTargetPair pair;
    pair.context = e.context;
    pair.dialogue_id = e.conversation_id;
    pair.turn_index = static_cast<int>(e.context.size());
    for (const auto& s : e.shown) {
      if (s.canned_id >= 0 && s.canned_id < n_canned) {
        emit(pair, s.canned_id, NegativeStrategy::kRejectedSuggestion, s.confidence);
      }
    }
  }
  return out;
}

std::vector<WeakLabel> usage_positives(const std::vector<UsageLogEntry>& usage, const CannedList& canned) {
  std::vector<WeakLabel> out;
  for (const auto& e : usage) {
    if (!e.reported || !e.used_canned_id) continue;
    validate(e);
    corpus::ContextTargetPair pair;
    pair.context = e.context;
    pair.dialogue_id = e.conversation_id;
    pair.turn_index = static_cast<int>(e.context.size());
    pair.target.speaker = corpus::Speaker::kAgent;
    pair.target.text = canned.at(*e.used_canned_id).text;
    double confidence = 1.0;
    for (const auto& s : e.shown) {
      if (s.canned_id == *e.used_canned_id) confidence = s.confidence;
    }
    out.push_back({std::move(pair), *e.used_canned_id, Polarity::kPositive, LabelSource::kUsageLog, std::nullopt,
                   confidence});
  }
  return out;
}

std::vector<WeakLabel> resolve_conflicts(std::vector<WeakLabel> labels) {
  std::set<std::pair<std::string, int>> positive;
  for (const auto& w : labels) {
    if (w.polarity == Polarity::kPositive) positive.insert({context_key(w.pair), w.canned_id});
  }
  std::erase_if(labels, [&](const WeakLabel& w) {
    return w.polarity == Polarity::kNegative && positive.count({context_key(w.pair), w.canned_id}) > 0;
  });
  return labels;
}

Json to_json(const WeakLabel& w) {
  validate(w);
  Json j = {{"pair", corpus::to_json(w.pair)},
            {"canned_id", w.canned_id},
            {"polarity", to_string(w.polarity)},
            {"score", w.score}};
  j["source"] = w.source ? Json(to_string(*w.source)) : Json(nullptr);
  j["negative_strategy"] = w.strategy ? Json(to_string(*w.strategy)) : Json(nullptr);
  return j;
}

WeakLabel weak_label_from_json(const Json& j) {
  WeakLabel w;
  try {
    w.pair = corpus::pair_from_json(j.at("pair"));
    w.canned_id = j.at("canned_id").get<int>();
    w.polarity = polarity_from_string(j.at("polarity").get<std::string>());
    w.score = j.value("score", 1.0);
    if (j.contains("source") && !j["source"].is_null()) w.source = label_source_from_string(j["source"].get<std::string>());
    if (j.contains("negative_strategy") && !j["negative_strategy"].is_null()) {
      w.strategy = negative_strategy_from_string(j["negative_strategy"].get<std::string>());
    }
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::kValidation, std::string("bad weak label: ") + ex.what());
  }
  validate(w);
  return w;
}

void write_weak_labels(const std::filesystem::path& path, const std::vector<WeakLabel>& labels) {
  std::vector<Json> records;
  records.reserve(labels.size());
  for (const auto& w : labels) records.push_back(to_json(w));
  write_jsonl(path, records);
}

std::vector<WeakLabel> read_weak_labels(const std::filesystem::path& path) {
  std::vector<WeakLabel> out;
  read_jsonl(path, [&](const Json& j) { out.push_back(weak_label_from_json(j)); });
  return out;
}

}  // namespace cannedbot::curation
