// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/numerics/graph.hpp"
#include "cannedbot/numerics/layers.hpp"
#include "cannedbot/numerics/rng.hpp"

#include <functional>
#include <vector>

namespace cannedbot::objectives {

using numerics::Binder;
using numerics::Graph;
using numerics::ParameterStore;
using numerics::Real;
using numerics::Rng;
using numerics::Tensor;
using numerics::Var;
using numerics::Vector;

inline constexpr Real kDefaultMargin = 1e-4;

/// (1/N) sum_i sum_{n != i} max(0, m + D(c_i, p_i) - D(c_i, p_n)) with D the
/// cosine distance; row i of `targets` is the positive of row i of
/// `contexts`. Throws BatchTooSmall for N < 2, ShapeMismatch for unequal
/// shapes and InvalidArgument for m <= 0.
Var max_margin_loss(Graph& g, Var contexts, Var targets, Real margin = kDefaultMargin);

/// Which target each pair is scored against, and its label.
struct BinaryAssignment {
  std::vector<int> target_index;
  std::vector<Real> labels;  // 1 = own target, 0 = shuffled
};

/// floor(N/2) pairs become negatives. Their targets are permuted along one
/// random cycle (Sattolo), so no negative keeps its own target and the
/// target multiset is unchanged. `same_target(i, j)`, when given, marks
/// content-identical targets; the shuffle is repaired by swaps so negatives
/// avoid them where possible. A lone negative (N < 4) borrows a positive's
/// target. Throws BatchTooSmall for N < 2.
BinaryAssignment make_binary_assignment(int n, Rng& rng,
                                        const std::function<bool(int, int)>& same_target = {});

/// Token-level view of a batch for callers that hold materialized pairs.
struct Batch {
  std::vector<std::vector<std::vector<int>>> contexts;
  std::vector<std::vector<int>> targets;
  std::vector<Real> labels;
};

/// Applies make_binary_assignment to `batch.targets` and fills the labels.
Batch make_binary_batch(const Batch& batch, Rng& rng);

/// sigmoid(w . [c; t; c*t] + b). The elementwise product term lets the
/// score of a target depend on the context; a head linear in [c; t] alone
/// ranks every context's candidates identically.
struct BinaryHead {
  numerics::Linear linear;

  static BinaryHead create(ParameterStore& store, int embedding_dim, Rng& rng);
  /// [N, 1] logits for row-aligned contexts and targets.
  Var logits(Binder& bind, Var contexts, Var targets) const;
  Real score(const ParameterStore& store, const Vector& context, const Vector& target) const;
  /// scores(i, j) = score(contexts.row(i), targets.row(j)).
  Tensor score_matrix(const ParameterStore& store, const Tensor& contexts, const Tensor& targets) const;
};

/// Mean binary cross-entropy of the head's scores against `labels`.
Var binary_loss(Binder& bind, const BinaryHead& head, Var contexts, Var targets,
                const std::vector<Real>& labels);

/// context -> linear -> tanh -> ... -> linear(n_classes) -> softmax.
struct MulticlassHead {
  std::vector<numerics::Linear> layers;
  int n_classes = 0;

  static MulticlassHead create(ParameterStore& store, int embedding_dim,
                               const std::vector<int>& hidden, int n_classes, Rng& rng);
  Var logits(Binder& bind, Var contexts) const;
  Vector probabilities(const ParameterStore& store, const Vector& context) const;
};

/// Mean softmax cross-entropy against class ids. Throws ClassCountMismatch
/// for ids outside [0, n_classes).
Var multiclass_loss(Binder& bind, const MulticlassHead& head, Var contexts,
                    const std::vector<int>& class_ids);

}  // namespace cannedbot::objectives
