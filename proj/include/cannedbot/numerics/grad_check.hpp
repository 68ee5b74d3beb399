// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/numerics/graph.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace cannedbot::numerics {

struct GradCheckOptions {
  Real step = 1e-4;
  Real tolerance = 1e-4;
  /// Above this many coordinates a random subsample of this size is checked.
  std::size_t max_coordinates = 10000;
  std::uint64_t seed = 0;
  /// Relative error is |a - n| / max(|a|, |n|, floor).
  Real denominator_floor = 1e-3;
};

struct GradCheckReport {
  Real max_relative_error = 0.0;
  std::size_t coordinates_checked = 0;
  std::string worst_parameter;
  Real worst_analytic = 0.0;
  Real worst_numeric = 0.0;
  bool passed = false;
};

/// Builds a scalar loss from the parameters bound through the Binder. Must
/// be deterministic (no dropout) because it is re-evaluated per coordinate.
using LossBuilder = std::function<Var(Binder&)>;

/// Compares backward() against central finite differences on `store`.
GradCheckReport grad_check(ParameterStore& store, const LossBuilder& build_loss,
                           const GradCheckOptions& options = {});

}  // namespace cannedbot::numerics
