// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/corpus/vocabulary.hpp"

#include "cannedbot/corpus/text.hpp"
#include "cannedbot/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>

namespace cannedbot::corpus {

Vocabulary::Vocabulary() {
  for (std::string_view t : {kEosToken, kEmptyToken, kUnkToken}) {
    ids_.emplace(std::string(t), static_cast<int>(tokens_.size()));
    tokens_.emplace_back(t);
  }
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < 3 || tokens[kEos] != kEosToken || tokens[kEmpty] != kEmptyToken ||
      tokens[kUnk] != kUnkToken) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary must start with <eos>, <empty>, <unk>");
  }
  Vocabulary v;
  v.tokens_.clear();
  v.ids_.clear();
  for (std::string& t : tokens) {
    const int id = static_cast<int>(v.tokens_.size());
    if (!v.ids_.emplace(t, id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate vocabulary token '" + t + "'");
    }
    v.tokens_.push_back(std::move(t));
  }
  return v;
}

Vocabulary Vocabulary::build(std::span<const Dialogue> corpus, std::size_t cap) {
  if (cap < 3) throw Error(ErrorCode::kInvalidArgument, "vocabulary cap must be >= 3");
  // std::map iteration order supplies the lexicographic tie-break.
  std::map<std::string, std::size_t> counts;
  for (const Dialogue& d : corpus) {
    for (const Utterance& u : d.utterances) {
      for (std::string& t : tokenize(normalize_text(u.text))) {
        if (t == kEosToken || t == kEmptyToken || t == kUnkToken) continue;
        ++counts[std::move(t)];
      }
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens = {std::string(kEosToken), std::string(kEmptyToken),
                                     std::string(kUnkToken)};
  for (auto& [word, count] : ranked) {
    if (tokens.size() >= cap) break;
    tokens.push_back(word);
  }
  return from_tokens(std::move(tokens));
}

int Vocabulary::id(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::encode(std::string_view normalized) const {
  std::vector<int> ids;
  for (const std::string& t : tokenize(normalized)) ids.push_back(id(t));
  return ids;
}

std::vector<int> Vocabulary::encode_padded(std::string_view normalized, int utterance_len) const {
  return pad_and_truncate(encode(normalized), utterance_len);
}

void Vocabulary::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const std::string& t : tokens_) out << t << '\n';
  if (!out.flush()) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) tokens.push_back(line);
  }
  return from_tokens(std::move(tokens));
}

std::vector<int> pad_and_truncate(std::span<const int> tokens, int utterance_len) {
  if (utterance_len < 2) throw Error(ErrorCode::kInvalidArgument, "utterance_len must be >= 2");
  const std::size_t len = static_cast<std::size_t>(utterance_len);
  const std::size_t keep = std::min(tokens.size(), len - 1);
  std::vector<int> out(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(keep));
  out.push_back(Vocabulary::kEos);
  out.resize(len, Vocabulary::kEmpty);
  return out;
}

int content_length(std::span<const int> padded) {
  for (std::size_t i = 0; i < padded.size(); ++i) {
    if (padded[i] == Vocabulary::kEos) return static_cast<int>(i + 1);
  }
  return static_cast<int>(padded.size());
}

}  // namespace cannedbot::corpus
