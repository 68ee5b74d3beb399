// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/corpus/dialogue.hpp"
#include "cannedbot/corpus/vocabulary.hpp"
#include "cannedbot/encoder/hierarchical.hpp"
#include "cannedbot/numerics/optimizer.hpp"

#include <array>
#include <optional>

namespace cannedbot::encoder {

struct SkipThoughtConfig {
  int vocab_size = 0;
  int word_dim = 64;
  int hidden = 128;
  int utterance_len = 40;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const SkipThoughtConfig&) const = default;
};

Json to_json(const SkipThoughtConfig& c);
SkipThoughtConfig skipthought_config_from_json(const Json& j);

/// Neighbour slots in offset order -2, -1, +1, +2.
inline constexpr std::array<int, 4> kSkipThoughtOffsets = {-2, -1, 1, 2};

struct SkipThoughtWindow {
  TokenRow center;
  std::array<std::optional<TokenRow>, 4> neighbors;

  int neighbor_count() const;
};

/// One window per agent utterance; missing neighbours at dialogue edges stay empty.
std::vector<SkipThoughtWindow> make_skipthought_windows(const std::vector<corpus::Dialogue>& dialogues,
                                                        const corpus::Vocabulary& vocab,
                                                        int utterance_len);

/// Single-layer LSTM encoder whose final hidden state seeds two decoders:
/// one shared by the two previous utterances and one shared by the two
/// following ones. Decoders are teacher-forced with <eos> as start symbol.
class SkipThoughtModel {
 public:
  SkipThoughtModel() = default;

  /// Parameter names are prefixed "st.".
  static SkipThoughtModel create(const SkipThoughtConfig& config, ParameterStore& store, Rng& rng);
  static SkipThoughtModel attach(const SkipThoughtConfig& config, const ParameterStore& store);

  const SkipThoughtConfig& config() const { return config_; }
  int embedding_dim() const { return config_.hidden; }

  /// [B, hidden] encoder final states.
  Var encode(Binder& bind, std::span<const TokenRow> rows) const;

  /// Summed token cross-entropy (content tokens plus <eos>) of every present
  /// neighbour of every window. Throws WindowTooShort for a window without
  /// neighbours.
  Var loss(Binder& bind, std::span<const SkipThoughtWindow> windows) const;

  /// One optimizer step over `windows`; returns the loss before the update.
  Real train_step(ParameterStore& store, numerics::Optimizer& optimizer,
                  std::span<const SkipThoughtWindow> windows) const;

  Vector embed(const ParameterStore& store, const TokenRow& tokens) const;

  numerics::ParamId output_weight(bool next) const { return (next ? next_out_ : prev_out_).weight; }

 private:
  Var decode_loss(Binder& bind, Var encoded, std::span<const SkipThoughtWindow> windows,
                  std::size_t slot) const;

  SkipThoughtConfig config_;
  numerics::ParamId word_table_ = 0;
  numerics::StackedLstm encoder_;
  numerics::StackedLstm prev_decoder_;
  numerics::StackedLstm next_decoder_;
  numerics::Linear prev_out_;
  numerics::Linear next_out_;
};

struct SkipThoughtTrainOptions {
  int epochs = 5;
  int batch_size = 32;
  numerics::OptimizerConfig optimizer{numerics::OptimizerKind::kAdam, 0.005};
  std::uint64_t seed = 1;
};

/// Trains on shuffled window batches; returns the mean loss per window of each epoch.
std::vector<Real> train_skipthought(const SkipThoughtModel& model, ParameterStore& store,
                                    const std::vector<SkipThoughtWindow>& windows,
                                    const SkipThoughtTrainOptions& options);

}  // namespace cannedbot::encoder
