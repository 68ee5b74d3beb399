// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/corpus/vocabulary.hpp"
#include "cannedbot/encoder/hierarchical.hpp"
#include "cannedbot/objectives/losses.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace cannedbot::objectives {

enum class Objective { kContrastive, kBinary, kMulticlass };

std::string_view to_string(Objective o);
/// Accepts "contrastive", "binary", "multiclass"; throws InvalidArgument otherwise.
Objective objective_from_string(std::string_view s);

struct HeadConfig {
  std::vector<int> multiclass_hidden = {256, 256};
  int n_classes = 0;
};

/// The hierarchical encoder plus the head of one objective, its vocabulary
/// and parameters. Saved as one checkpoint whose manifest records the
/// configuration and the vocabulary.
class ResponseModel {
 public:
  static ResponseModel create(Objective objective, const encoder::ModelConfig& config,
                              corpus::Vocabulary vocab, const HeadConfig& heads = {});
  static ResponseModel load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  Objective objective() const { return objective_; }
  const encoder::ModelConfig& config() const { return encoder_.config(); }
  const encoder::HierarchicalModel& encoder() const { return encoder_; }
  const corpus::Vocabulary& vocab() const { return vocab_; }
  const HeadConfig& head_config() const { return heads_; }
  const BinaryHead& binary_head() const;
  const MulticlassHead& multiclass_head() const;
  int n_classes() const { return heads_.n_classes; }

  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }
  /// Digest of the current parameters; changes with every update.
  std::string checkpoint_id() const;

  /// Normalizes, tokenizes and pads to the configured utterance_len.
  encoder::TokenRow tokenize(std::string_view text) const;

  // Inference (eval mode).
  Vector utterance_embedding(std::string_view text) const;
  Vector context_embedding(std::span<const Vector> utterance_embeddings) const;
  Vector target_embedding(std::string_view text) const;
  Real binary_score(const Vector& context, const Vector& target) const;
  Vector class_probabilities(const Vector& context) const;

 private:
  Objective objective_ = Objective::kContrastive;
  encoder::HierarchicalModel encoder_;
  corpus::Vocabulary vocab_;
  HeadConfig heads_;
  std::optional<BinaryHead> binary_;
  std::optional<MulticlassHead> multiclass_;
  ParameterStore params_;
};

}  // namespace cannedbot::objectives
