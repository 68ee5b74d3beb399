// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/objectives/losses.hpp"

#include "cannedbot/error.hpp"
#include "cannedbot/numerics/ops.hpp"

#include <numeric>

namespace cannedbot::objectives {

namespace ops = cannedbot::numerics;

Var max_margin_loss(Graph& g, Var contexts, Var targets, Real margin) {
  if (!(margin > 0.0)) throw Error(ErrorCode::kInvalidArgument, "margin must be > 0");
  const Tensor& c = g.value(contexts);
  const Tensor& t = g.value(targets);
  if (c.rows() < 2) throw Error(ErrorCode::kBatchTooSmall, "max_margin_loss needs N >= 2");
  numerics::require_shape(t, c.rows(), c.cols(), "max_margin_loss");
  return ops::triplet_hinge_mean(g, ops::pairwise_cosine_distance(g, contexts, targets), margin);
}

BinaryAssignment make_binary_assignment(int n, Rng& rng,
                                        const std::function<bool(int, int)>& same_target) {
  if (n < 2) throw Error(ErrorCode::kBatchTooSmall, "binary batch needs N >= 2");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const auto n_neg = static_cast<std::size_t>(n / 2);
  std::vector<int> negatives(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_neg));
  std::sort(negatives.begin(), negatives.end());

  BinaryAssignment out;
  out.target_index.resize(static_cast<std::size_t>(n));
  std::iota(out.target_index.begin(), out.target_index.end(), 0);
  out.labels.assign(static_cast<std::size_t>(n), 1.0);
  for (int i : negatives) out.labels[static_cast<std::size_t>(i)] = 0.0;

  auto clash = [&](int pair, int target) {
    return target == pair || (same_target && same_target(pair, target));
  };

  if (n_neg == 1) {
    std::vector<int> positives(order.begin() + 1, order.end());
    const int i = negatives.front();
    int pick = positives[rng.index(positives.size())];
    for (std::size_t tries = 0; tries < positives.size() && clash(i, pick); ++tries) {
      pick = positives[(tries + 1) % positives.size()];
    }
    out.target_index[static_cast<std::size_t>(i)] = pick;
    return out;
  }

  // Sattolo's algorithm: a uniformly random single cycle, hence fixed-point free.
  std::vector<int> perm = negatives;
  for (std::size_t k = perm.size(); k > 1; --k) std::swap(perm[k - 1], perm[rng.index(k - 1)]);
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    out.target_index[static_cast<std::size_t>(negatives[k])] = perm[k];
  }
  if (same_target) {
    // Swapping two negatives' assigned targets keeps the multiset; accept a
    // swap only if it clears a clash without creating one.
    for (std::size_t a = 0; a < negatives.size(); ++a) {
      const int i = negatives[a];
      auto& ti = out.target_index[static_cast<std::size_t>(i)];
      if (!clash(i, ti)) continue;
      for (std::size_t b = 0; b < negatives.size(); ++b) {
        const int j = negatives[b];
        auto& tj = out.target_index[static_cast<std::size_t>(j)];
        if (j == i || clash(i, tj) || clash(j, ti)) continue;
        std::swap(ti, tj);
        break;
      }
    }
  }
  return out;
}

Batch make_binary_batch(const Batch& batch, Rng& rng) {
  const auto n = static_cast<int>(batch.targets.size());
  if (batch.contexts.size() != batch.targets.size()) {
    throw Error(ErrorCode::kShapeMismatch, "batch contexts and targets differ in length");
  }
  const auto assignment = make_binary_assignment(n, rng, [&](int i, int j) {
    return batch.targets[static_cast<std::size_t>(i)] == batch.targets[static_cast<std::size_t>(j)];
  });
  Batch out;
  out.contexts = batch.contexts;
  out.targets.reserve(batch.targets.size());
  for (int idx : assignment.target_index) out.targets.push_back(batch.targets[static_cast<std::size_t>(idx)]);
  out.labels = assignment.labels;
  return out;
}

BinaryHead BinaryHead::create(ParameterStore& store, int embedding_dim, Rng& rng) {
  return {numerics::Linear::create(store, "head.binary", 3 * embedding_dim, 1, rng)};
}

Var BinaryHead::logits(Binder& bind, Var contexts, Var targets) const {
  auto& g = bind.graph();
  numerics::require_shape(g.value(targets), g.value(contexts).rows(), g.value(contexts).cols(),
                          "binary head");
  const Var parts[] = {contexts, targets, ops::mul(g, contexts, targets)};
  return linear.apply(bind, ops::concat_cols(g, parts));
}

Real BinaryHead::score(const ParameterStore& store, const Vector& context, const Vector& target) const {
  Graph g(numerics::GradMode::kDisabled);
  Binder bind(g, store);
  const Var l = logits(bind, g.constant(context), g.constant(target));
  return ops::sigmoid(g.value(l)(0, 0));
}

Tensor BinaryHead::score_matrix(const ParameterStore& store, const Tensor& contexts,
                                const Tensor& targets) const {
  const Eigen::Index d = contexts.cols();
  numerics::require_shape(targets, targets.rows(), d, "binary score_matrix");
  const Tensor& w = store[linear.weight].value;  // [3d, 1]
  const Real b = linear.bias ? store[*linear.bias].value(0, 0) : 0.0;
  const Tensor wc = w.topRows(d).transpose();
  const Tensor wt = w.middleRows(d, d);
  const Tensor wct = w.bottomRows(d).transpose();
  const Tensor target_term = targets * wt;  // [Nt, 1]
  Tensor out(contexts.rows(), targets.rows());
  for (Eigen::Index i = 0; i < contexts.rows(); ++i) {
    const Vector c = contexts.row(i);
    const Real context_term = c.dot(wc.row(0)) + b;
    const Vector mixed = c.cwiseProduct(wct.row(0));
    const Tensor interaction = targets * mixed.transpose();
    for (Eigen::Index j = 0; j < targets.rows(); ++j) {
      out(i, j) = ops::sigmoid(context_term + target_term(j, 0) + interaction(j, 0));
    }
  }
  return out;
}

Var binary_loss(Binder& bind, const BinaryHead& head, Var contexts, Var targets,
                const std::vector<Real>& labels) {
  for (Real l : labels) {
    if (l != 0.0 && l != 1.0) throw Error(ErrorCode::kInvalidArgument, "binary labels must be 0 or 1");
  }
  return ops::bce_with_logits_mean(bind.graph(), head.logits(bind, contexts, targets), labels);
}

MulticlassHead MulticlassHead::create(ParameterStore& store, int embedding_dim,
                                      const std::vector<int>& hidden, int n_classes, Rng& rng) {
  if (n_classes < 1) throw Error(ErrorCode::kClassCountMismatch, "multiclass head needs >= 1 class");
  MulticlassHead h;
  h.n_classes = n_classes;
  int in = embedding_dim;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (hidden[i] < 1) throw Error(ErrorCode::kInvalidArgument, "hidden width must be >= 1");
    h.layers.push_back(numerics::Linear::create(store, "head.multiclass." + std::to_string(i), in, hidden[i], rng));
    in = hidden[i];
  }
  h.layers.push_back(numerics::Linear::create(store, "head.multiclass.out", in, n_classes, rng));
  return h;
}

Var MulticlassHead::logits(Binder& bind, Var contexts) const {
  Var x = contexts;
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) x = ops::tanh(bind.graph(), layers[i].apply(bind, x));
  return layers.back().apply(bind, x);
}

Vector MulticlassHead::probabilities(const ParameterStore& store, const Vector& context) const {
  Graph g(numerics::GradMode::kDisabled);
  Binder bind(g, store);
  return ops::softmax_rows(g.value(logits(bind, g.constant(context))));
}

Var multiclass_loss(Binder& bind, const MulticlassHead& head, Var contexts,
                    const std::vector<int>& class_ids) {
  for (int id : class_ids) {
    if (id < 0 || id >= head.n_classes) {
      throw Error(ErrorCode::kClassCountMismatch, "class id " + std::to_string(id) + " outside head of " +
                                                      std::to_string(head.n_classes) + " classes");
    }
  }
  return ops::softmax_cross_entropy(bind.graph(), head.logits(bind, contexts), class_ids,
                                    ops::Reduction::kMean);
}

}  // namespace cannedbot::objectives
