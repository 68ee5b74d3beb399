// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/jsonl.hpp"

#include <cstdint>

namespace cannedbot::encoder {

/// Desk-scale defaults; full scale uses word_dim 200.
struct ModelConfig {
  int vocab_size = 0;
  int word_dim = 64;
  int utterance_hidden = 128;
  int context_hidden = 128;
  int projection_dim = 128;
  int lstm_layers = 2;
  double dropout_keep = 0.5;
  bool share_utterance_weights = true;
  int utterance_len = 40;
  int max_context_utterances = 20;
  std::uint64_t seed = 1;

  /// Throws InvalidArgument unless all dims are >= 1, dropout_keep is in
  /// (0, 1] and utterance_len >= 2.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

Json to_json(const ModelConfig& c);
/// Missing keys keep their defaults.
ModelConfig model_config_from_json(const Json& j);

}  // namespace cannedbot::encoder
