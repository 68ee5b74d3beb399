// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/numerics/graph.hpp"
#include "cannedbot/numerics/rng.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cannedbot::numerics {

inline constexpr Real kRecurrentInitBound = 0.08;
inline constexpr Real kForgetBias = 1.0;

Tensor uniform_tensor(Eigen::Index rows, Eigen::Index cols, Real bound, Rng& rng);

/// y = x W + b.
struct Linear {
  ParamId weight = 0;
  std::optional<ParamId> bias;

  /// Xavier-uniform weights, zero bias.
  static Linear create(ParameterStore& store, const std::string& prefix, Eigen::Index in,
                       Eigen::Index out, Rng& rng, bool with_bias = true);
  Var apply(Binder& bind, Var x) const;
};

struct LstmState {
  Var h;
  Var c;
};

/// Gates are packed [i | f | g | o] along columns of the 4H-wide weights.
struct LstmWeights {
  ParamId input_weights = 0;      // [I, 4H]
  ParamId recurrent_weights = 0;  // [H, 4H]
  ParamId bias = 0;               // [1, 4H]
  Eigen::Index hidden = 0;

  static LstmWeights create(ParameterStore& store, const std::string& prefix, Eigen::Index in,
                            Eigen::Index hidden, Rng& rng);
};

/// i, f, o = sigmoid(.), g = tanh(.), c' = f*c + i*g, h' = o*tanh(c').
LstmState lstm_cell(Graph& g, Var x, const LstmState& prev, Var wx, Var wh, Var b);

struct SequenceOutput {
  std::vector<Var> outputs;  // top layer, one [B, H] per step
  Var final;                 // top layer at each row's last valid step
};

/// Stacked LSTM over a batch of variable-length sequences. Row r consumes
/// steps [0, lengths[r]); past its end a row's state is carried unchanged.
/// With residual connections each layer emits h + x (identity) or h + x S
/// (learned shim S) when the input width differs from the hidden width.
class StackedLstm {
 public:
  StackedLstm() = default;
  static StackedLstm create(ParameterStore& store, const std::string& prefix, Eigen::Index input,
                            Eigen::Index hidden, int layers, bool residual, Rng& rng);

  /// `initial_h` (optional, [B, H]) seeds the first layer's hidden state.
  SequenceOutput run(Binder& bind, std::span<const Var> steps, std::span<const int> lengths,
                     std::optional<Var> initial_h = std::nullopt) const;

  Eigen::Index hidden() const { return hidden_; }
  int layers() const { return static_cast<int>(layers_.size()); }
  const std::vector<LstmWeights>& layer_weights() const { return layers_; }

 private:
  std::vector<LstmWeights> layers_;
  std::vector<std::optional<ParamId>> shims_;
  std::vector<bool> residual_identity_;
  Eigen::Index hidden_ = 0;
  bool residual_ = false;
};

}  // namespace cannedbot::numerics
