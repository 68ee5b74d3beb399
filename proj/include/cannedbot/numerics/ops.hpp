// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/numerics/graph.hpp"
#include "cannedbot/numerics/rng.hpp"

#include <span>
#include <vector>

namespace cannedbot::numerics {

inline constexpr Real kLayerNormEps = 1e-5;
inline constexpr Real kCosineEps = 1e-8;

// Differentiable primitives. Every op checks shapes (ShapeMismatch) and
// rejects non-finite results (NonFiniteValue).

/// a[B,I] * b[I,O]. Each output row is computed independently of the others,
/// so a row's value does not depend on how many rows are batched with it.
Var matmul(Graph& g, Var a, Var b);
Var add(Graph& g, Var a, Var b);
Var sub(Graph& g, Var a, Var b);
Var mul(Graph& g, Var a, Var b);
/// a[B,O] + row[1,O] broadcast over rows.
Var add_row(Graph& g, Var a, Var row);
Var scale(Graph& g, Var a, Real s);
Var sigmoid(Graph& g, Var a);
Var tanh(Graph& g, Var a);
Var relu(Graph& g, Var a);

Var concat_cols(Graph& g, std::span<const Var> parts);
Var slice_cols(Graph& g, Var a, Eigen::Index start, Eigen::Index width);

/// out.row(r) = table.row(ids[r]); gradients scatter-add back.
Var gather_rows(Graph& g, Var table, std::span<const int> ids);
/// out.row(r) = take_first[r] ? a.row(r) : b.row(r).
Var select_rows(Graph& g, const std::vector<bool>& take_first, Var a, Var b);

/// Per-row (x - mean) / sqrt(var + eps), then gamma * . + beta.
Var layer_norm(Graph& g, Var x, Var gamma, Var beta, Real eps = kLayerNormEps);
/// Inverted dropout: kept entries are scaled by 1/keep.
Var dropout(Graph& g, Var x, Real keep, Rng& rng);

/// out[r,0] = 1 - <a_r, b_r> / max(|a_r| |b_r|, eps).
Var rowwise_cosine_distance(Graph& g, Var a, Var b, Real eps = kCosineEps);
/// out[i,j] = 1 - <a_i, b_j> / max(|a_i| |b_j|, eps).
Var pairwise_cosine_distance(Graph& g, Var a, Var b, Real eps = kCosineEps);

/// For a square distance matrix D (row i = context i, column j = target j):
/// (1/N) sum_i sum_{j != i} max(0, margin + D[i,i] - D[i,j]).
Var triplet_hinge_mean(Graph& g, Var distances, Real margin);

/// Mean binary cross-entropy of sigmoid(logits[B,1]) against labels in {0,1}.
Var bce_with_logits_mean(Graph& g, Var logits, std::span<const Real> labels);

enum class Reduction { kSum, kMean };
/// Softmax cross-entropy per row; rows with a negative target are ignored.
Var softmax_cross_entropy(Graph& g, Var logits, std::span<const int> targets,
                          Reduction reduction);

Var sum(Graph& g, Var a);
Var mean(Graph& g, Var a);

// Plain forward helpers.
Real cosine_distance(const Vector& u, const Vector& v, Real eps = kCosineEps);
Real cosine_similarity(const Vector& u, const Vector& v, Real eps = kCosineEps);
Tensor softmax_rows(const Tensor& logits);
inline Real sigmoid(Real x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace cannedbot::numerics
