// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/corpus/dialogue.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cannedbot::corpus {

inline constexpr std::size_t kDefaultVocabCap = 5000;
inline constexpr int kDefaultUtteranceLen = 40;

class Vocabulary {
 public:
  static constexpr int kEos = 0;
  static constexpr int kEmpty = 1;
  static constexpr int kUnk = 2;
  static constexpr std::string_view kEosToken = "<eos>";
  static constexpr std::string_view kEmptyToken = "<empty>";
  static constexpr std::string_view kUnkToken = "<unk>";

  /// Only the three special tokens.
  Vocabulary();

  /// Specials plus the cap-3 most frequent normalized tokens, ties broken
  /// lexicographically. Throws InvalidArgument for cap < 3.
  static Vocabulary build(std::span<const Dialogue> corpus, std::size_t cap = kDefaultVocabCap);

  /// Ids dense in [0, size()); the first three entries are the specials.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  int id(std::string_view token) const;
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  /// Ids of the whitespace tokens of normalized text; unseen words map to <unk>.
  std::vector<int> encode(std::string_view normalized) const;
  std::vector<int> encode_padded(std::string_view normalized, int utterance_len) const;

  /// One token per line, in id order.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

/// First utterance_len-1 tokens, then <eos>, then <empty> up to utterance_len.
/// Throws InvalidArgument for utterance_len < 2.
std::vector<int> pad_and_truncate(std::span<const int> tokens, int utterance_len);

/// Number of steps an encoder consumes: up to and including the first <eos>,
/// or the full length when there is none.
int content_length(std::span<const int> padded);

}  // namespace cannedbot::corpus
