// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/corpus/vocabulary.hpp"
#include "cannedbot/encoder/hierarchical.hpp"
#include "cannedbot/encoder/skipthought.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cannedbot::encoder {

/// Text -> vector map used by curation for clustering, similarity and
/// deduplication. Inputs are raw text; implementations normalize.
class UtteranceEmbedder {
 public:
  virtual ~UtteranceEmbedder() = default;
  virtual Vector embed(std::string_view text) const = 0;
  virtual int dim() const = 0;
  /// Identifies the embedding space (checkpoint digest or equivalent).
  virtual std::string id() const = 0;

  Tensor embed_all(const std::vector<std::string>& texts) const;
};

class SkipThoughtEmbedder final : public UtteranceEmbedder {
 public:
  SkipThoughtEmbedder(SkipThoughtModel model, ParameterStore store, corpus::Vocabulary vocab);

  /// Checkpoint whose manifest records the config and the vocabulary.
  void save(const std::filesystem::path& path) const;
  static SkipThoughtEmbedder load(const std::filesystem::path& path);

  Vector embed(std::string_view text) const override;
  int dim() const override { return model_.embedding_dim(); }
  std::string id() const override { return id_; }

 private:
  SkipThoughtModel model_;
  ParameterStore store_;
  corpus::Vocabulary vocab_;
  std::string id_;
};

/// Target-side embedding of the matching model, the space responses are ranked in.
class MatchingEmbedder final : public UtteranceEmbedder {
 public:
  MatchingEmbedder(HierarchicalModel model, ParameterStore store, corpus::Vocabulary vocab);

  Vector embed(std::string_view text) const override;
  int dim() const override { return model_.embedding_dim(); }
  std::string id() const override { return id_; }

 private:
  HierarchicalModel model_;
  ParameterStore store_;
  corpus::Vocabulary vocab_;
  std::string id_;
};

}  // namespace cannedbot::encoder
