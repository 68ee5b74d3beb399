// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/encoder/config.hpp"
#include "cannedbot/numerics/graph.hpp"
#include "cannedbot/numerics/layers.hpp"
#include "cannedbot/numerics/rng.hpp"

#include <span>
#include <vector>

namespace cannedbot::encoder {

using numerics::Binder;
using numerics::ParameterStore;
using numerics::Real;
using numerics::Rng;
using numerics::Tensor;
using numerics::Var;
using numerics::Vector;

using TokenRow = std::vector<int>;

/// Train mode applies dropout with `rng`; eval mode is deterministic.
struct ForwardMode {
  bool train = false;
  Rng* rng = nullptr;

  static ForwardMode eval() { return {}; }
  static ForwardMode training(Rng& r) { return {true, &r}; }
};

enum class UtteranceSide { kContext, kTarget };

/// Word embedding -> stacked residual LSTM -> layer norm gives an utterance
/// vector; a context LSTM stack over utterance vectors, and separate linear
/// projections for context and target, map both into one matching space.
///
/// Parameters live in a caller-owned ParameterStore; the model holds ids only.
class HierarchicalModel {
 public:
  HierarchicalModel() = default;

  /// Appends freshly initialized parameters (names prefixed "enc.") to `store`.
  static HierarchicalModel create(const ModelConfig& config, ParameterStore& store, Rng& rng);

  /// Rebuilds the id layout for `config` and checks `store` matches it.
  static HierarchicalModel attach(const ModelConfig& config, const ParameterStore& store);

  const ModelConfig& config() const { return config_; }
  int utterance_dim() const { return config_.utterance_hidden; }
  int embedding_dim() const { return config_.projection_dim; }

  // Graph-level API (batched). Every row is computed independently of the
  // other rows in its batch.

  /// rows: padded token rows of one common length -> [B, utterance_dim].
  /// Rows run up to and including their first <eos>. Throws TokenOutOfRange.
  Var encode_utterances(Binder& bind, std::span<const TokenRow> rows,
                        UtteranceSide side = UtteranceSide::kContext) const;

  /// contexts[i] lists row indices of `utterances` in dialogue order, oldest
  /// first -> [N, embedding_dim]. Throws EmptyContext for an empty entry.
  Var encode_contexts(Binder& bind, Var utterances, const std::vector<std::vector<int>>& contexts,
                      ForwardMode mode) const;

  /// Target-side utterance vectors [N, utterance_dim] -> [N, embedding_dim].
  Var project_targets(Binder& bind, Var utterances, ForwardMode mode) const;

  // Inference helpers (eval mode, frozen parameters).
  Vector encode_utterance(const ParameterStore& store, const TokenRow& tokens,
                          UtteranceSide side = UtteranceSide::kContext) const;
  Vector encode_context(const ParameterStore& store, std::span<const Vector> utterances) const;
  Vector embed_target(const ParameterStore& store, const TokenRow& tokens) const;

  /// Replaces the word table (e.g. with skip-gram vectors); shape must match.
  void set_word_embeddings(ParameterStore& store, const Tensor& table) const;

  // Parameter groups, for gradient-flow checks and pre-training.
  numerics::ParamId word_table() const { return word_table_; }
  const numerics::StackedLstm& utterance_lstm(UtteranceSide side) const;
  const numerics::StackedLstm& context_lstm() const { return context_lstm_; }
  const numerics::Linear& context_projection() const { return context_projection_; }
  const numerics::Linear& target_projection() const { return target_projection_; }

 private:
  struct UtteranceEncoder {
    numerics::StackedLstm lstm;
    numerics::ParamId gamma = 0;
    numerics::ParamId beta = 0;
  };

  const UtteranceEncoder& utterance_encoder(UtteranceSide side) const;
  void check_tokens(std::span<const TokenRow> rows) const;

  ModelConfig config_;
  numerics::ParamId word_table_ = 0;
  UtteranceEncoder context_side_;
  UtteranceEncoder target_side_;
  numerics::StackedLstm context_lstm_;
  numerics::Linear context_projection_;
  numerics::Linear target_projection_;
};

}  // namespace cannedbot::encoder
