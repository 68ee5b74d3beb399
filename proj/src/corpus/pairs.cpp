// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/corpus/pairs.hpp"

#include "cannedbot/corpus/text.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/jsonl.hpp"

#include <algorithm>
#include <unordered_map>

namespace cannedbot::corpus {

void tokenize_utterance(Utterance& u, const Vocabulary& vocab, int utterance_len) {
  u.tokens = vocab.encode_padded(normalize_text(u.text), utterance_len);
}

std::vector<ContextTargetPair> make_pairs(const Dialogue& regularized, const Vocabulary& vocab,
                                          const PairOptions& options) {
  if (options.max_context_utterances < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_context_utterances must be >= 1");
  }
  std::vector<Utterance> tokenized = regularized.utterances;
  for (Utterance& u : tokenized) tokenize_utterance(u, vocab, options.utterance_len);

  std::vector<ContextTargetPair> pairs;
  const auto max_ctx = static_cast<std::size_t>(options.max_context_utterances);
  for (std::size_t i = 1; i < tokenized.size(); ++i) {
    if (tokenized[i].speaker != Speaker::kAgent) continue;
    ContextTargetPair p;
    const std::size_t begin = i > max_ctx ? i - max_ctx : 0;
    p.context.assign(tokenized.begin() + static_cast<std::ptrdiff_t>(begin),
                     tokenized.begin() + static_cast<std::ptrdiff_t>(i));
    p.target = tokenized[i];
    p.dialogue_id = regularized.id;
    p.turn_index = static_cast<int>(i);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<ContextTargetPair> make_pairs(const std::vector<Dialogue>& regularized,
                                          const Vocabulary& vocab, const PairOptions& options) {
  std::vector<ContextTargetPair> all;
  for (const Dialogue& d : regularized) {
    auto pairs = make_pairs(d, vocab, options);
    std::move(pairs.begin(), pairs.end(), std::back_inserter(all));
  }
  return all;
}

Json to_json(const ContextTargetPair& p) {
  Json context = Json::array(), context_text = Json::array(), context_speakers = Json::array();
  for (const Utterance& u : p.context) {
    context.push_back(u.tokens);
    context_text.push_back(u.text);
    context_speakers.push_back(to_string(u.speaker));
  }
  Json r = {{"dialogue_id", p.dialogue_id},
            {"turn_index", p.turn_index},
            {"context", std::move(context)},
            {"target", p.target.tokens},
            {"context_text", std::move(context_text)},
            {"context_speakers", std::move(context_speakers)},
            {"target_text", p.target.text}};
  if (p.target.intent) r["target_intent"] = *p.target.intent;
  Json intents = Json::array();
  bool any_intent = false;
  for (const Utterance& u : p.context) {
    intents.push_back(u.intent ? Json(*u.intent) : Json(nullptr));
    any_intent = any_intent || u.intent.has_value();
  }
  if (any_intent) r["context_intents"] = std::move(intents);
  return r;
}

ContextTargetPair pair_from_json(const Json& j) {
  ContextTargetPair p;
  p.dialogue_id = j.at("dialogue_id").get<std::string>();
  p.turn_index = j.at("turn_index").get<int>();
  const Json& context = j.at("context");
  const std::size_t n = context.size();
  // Context alternates ending with a customer turn, so speakers default by parity.
  for (std::size_t i = 0; i < n; ++i) {
    Utterance u;
    u.tokens = context[i].get<std::vector<int>>();
    u.speaker = (n - i) % 2 == 1 ? Speaker::kCustomer : Speaker::kAgent;
    if (j.contains("context_speakers")) {
      u.speaker = speaker_from_string(j["context_speakers"].at(i).get<std::string>());
    }
    if (j.contains("context_text")) u.text = j["context_text"].at(i).get<std::string>();
    if (j.contains("context_intents") && !j["context_intents"].at(i).is_null()) {
      u.intent = j["context_intents"][i].get<int>();
    }
    p.context.push_back(std::move(u));
  }
  p.target.speaker = Speaker::kAgent;
  p.target.tokens = j.at("target").get<std::vector<int>>();
  if (j.contains("target_text")) p.target.text = j["target_text"].get<std::string>();
  if (j.contains("target_intent")) p.target.intent = j["target_intent"].get<int>();
  return p;
}

void write_pairs(const std::filesystem::path& path, const std::vector<ContextTargetPair>& pairs) {
  std::vector<Json> records;
  records.reserve(pairs.size());
  for (const ContextTargetPair& p : pairs) records.push_back(to_json(p));
  write_jsonl(path, records);
}

std::vector<ContextTargetPair> read_pairs(const std::filesystem::path& path) {
  std::vector<ContextTargetPair> out;
  read_jsonl(path, [&](const Json& j) { out.push_back(pair_from_json(j)); });
  return out;
}

PairSplit split_by_dialogue(const std::vector<ContextTargetPair>& pairs, int every) {
  if (every < 2) throw Error(ErrorCode::kInvalidArgument, "split period must be at least 2");
  std::unordered_map<std::string, std::size_t> order;
  PairSplit out;
  for (const auto& p : pairs) {
    const auto [it, fresh] = order.emplace(p.dialogue_id, order.size());
    (it->second % static_cast<std::size_t>(every) == 0 ? out.held_out : out.train).push_back(p);
  }
  return out;
}

}  // namespace cannedbot::corpus
