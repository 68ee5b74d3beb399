// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/corpus/dialogue.hpp"

#include "cannedbot/corpus/text.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/jsonl.hpp"

#include <cstdio>

namespace cannedbot::corpus {

std::string_view to_string(Speaker s) { return s == Speaker::kAgent ? "agent" : "customer"; }

Speaker speaker_from_string(std::string_view s) {
  if (s == "agent") return Speaker::kAgent;
  if (s == "customer") return Speaker::kCustomer;
  throw Error(ErrorCode::kParse, "unknown speaker '" + std::string(s) + "'");
}

Dialogue regularize_turns(const Dialogue& d, const RegularizeOptions& options) {
  Dialogue out;
  out.id = d.id;
  for (const Utterance& u : d.utterances) {
    std::string text = normalize_text(u.text);
    if (text.empty()) continue;
    if (!out.utterances.empty() && out.utterances.back().speaker == u.speaker) {
      Utterance& last = out.utterances.back();
      last.text += ' ';
      last.text += text;
      if (last.intent != u.intent) last.intent.reset();
      continue;
    }
    Utterance merged;
    merged.speaker = u.speaker;
    merged.text = std::move(text);
    merged.intent = u.intent;
    out.utterances.push_back(std::move(merged));
  }
  if (out.utterances.empty()) {
    throw Error(ErrorCode::kEmptyDialogue, "dialogue '" + d.id + "' has no text after normalization");
  }
  if (out.utterances.front().speaker == Speaker::kCustomer) {
    Utterance greeting;
    greeting.speaker = Speaker::kAgent;
    greeting.text = normalize_text(options.greeting);
    out.utterances.insert(out.utterances.begin(), std::move(greeting));
  }
  return out;
}

bool is_regular(const Dialogue& d) {
  for (std::size_t i = 0; i < d.utterances.size(); ++i) {
    const Speaker expected = i % 2 == 0 ? Speaker::kAgent : Speaker::kCustomer;
    if (d.utterances[i].speaker != expected) return false;
  }
  return !d.utterances.empty();
}

namespace {

Json utterance_to_json(const Utterance& u) {
  Json j = {{"speaker", to_string(u.speaker)}, {"text", u.text}};
  if (u.intent) j["intent"] = *u.intent;
  return j;
}

Utterance utterance_from_json(const Json& j) {
  Utterance u;
  u.speaker = speaker_from_string(j.at("speaker").get<std::string>());
  u.text = j.at("text").get<std::string>();
  if (j.contains("intent") && !j["intent"].is_null()) u.intent = j["intent"].get<int>();
  return u;
}

}  // namespace

void write_corpus(const std::filesystem::path& path, const std::vector<Dialogue>& dialogues) {
  std::vector<Json> records;
  records.reserve(dialogues.size());
  for (const Dialogue& d : dialogues) {
    Json utterances = Json::array();
    for (const Utterance& u : d.utterances) utterances.push_back(utterance_to_json(u));
    records.push_back({{"id", d.id}, {"utterances", std::move(utterances)}});
  }
  write_jsonl(path, records);
}

std::vector<Dialogue> read_corpus(const std::filesystem::path& path) {
  std::vector<Dialogue> out;
  read_jsonl(path, [&](const Json& j) {
    Dialogue d;
    d.id = j.at("id").get<std::string>();
    for (const Json& u : j.at("utterances")) d.utterances.push_back(utterance_from_json(u));
    out.push_back(std::move(d));
  });
  return out;
}

CorpusStats compute_stats(const std::vector<Dialogue>& dialogues) {
  CorpusStats s;
  s.dialogues = dialogues.size();
  std::size_t words = 0, agent_words = 0, customer_words = 0, agent_n = 0, customer_n = 0;
  for (const Dialogue& d : dialogues) {
    for (const Utterance& u : d.utterances) {
      const std::size_t n = tokenize(normalize_text(u.text)).size();
      ++s.utterances;
      words += n;
      if (u.speaker == Speaker::kAgent) {
        agent_words += n;
        ++agent_n;
      } else {
        customer_words += n;
        ++customer_n;
      }
    }
  }
  auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / b; };
  s.words_per_dialogue = ratio(words, s.dialogues);
  s.words_per_agent_utterance = ratio(agent_words, agent_n);
  s.words_per_customer_utterance = ratio(customer_words, customer_n);
  return s;
}

std::string format_stats(const CorpusStats& stats) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%-40s %12zu\n%-40s %12zu\n%-40s %12.1f\n%-40s %12.1f\n%-40s %12.1f\n",
                "# dialogues", stats.dialogues, "# utterances (in total)", stats.utterances,
                "Avg. # words per dialogue", stats.words_per_dialogue,
                "Avg. # words per agent utterance", stats.words_per_agent_utterance,
                "Avg. # words per customer utterance", stats.words_per_customer_utterance);
  return buf;
}

}  // namespace cannedbot::corpus
