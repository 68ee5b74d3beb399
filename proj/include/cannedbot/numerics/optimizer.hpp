// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/numerics/tensor.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace cannedbot::numerics {

enum class OptimizerKind { kSgd, kAdam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(std::string_view s);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kSgd;
  Real learning_rate = 0.1;
  /// Multiplied into the learning rate at every end_epoch().
  Real lr_decay = 1.0;
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real epsilon = 1e-8;
  /// Global gradient-norm clip; 0 disables.
  Real clip_norm = 0.0;
};

/// SGD: p -= lr * g. Adam: bias-corrected first/second moments.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config) : config_(config), lr_(config.learning_rate) {}

  /// Applies one update from the gradients held in `store`, then zeroes them.
  void step(ParameterStore& store);
  void end_epoch() { lr_ *= config_.lr_decay; }

  Real learning_rate() const { return lr_; }
  std::size_t steps_taken() const { return t_; }
  const OptimizerConfig& config() const { return config_; }

 private:
  OptimizerConfig config_;
  Real lr_;
  std::size_t t_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace cannedbot::numerics
