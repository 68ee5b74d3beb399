// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/encoder/hierarchical.hpp"

#include "cannedbot/corpus/vocabulary.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/numerics/ops.hpp"

#include <algorithm>

namespace cannedbot::encoder {

namespace ops = cannedbot::numerics;

HierarchicalModel HierarchicalModel::create(const ModelConfig& config, ParameterStore& store,
                                            Rng& rng) {
  config.validate();
  HierarchicalModel m;
  m.config_ = config;
  m.word_table_ = store.add(
      "enc.word_embedding",
      numerics::uniform_tensor(config.vocab_size, config.word_dim, numerics::kRecurrentInitBound, rng));

  auto make_utterance = [&](const std::string& prefix) {
    UtteranceEncoder e;
    e.lstm = numerics::StackedLstm::create(store, prefix + ".lstm", config.word_dim,
                                           config.utterance_hidden, config.lstm_layers, true, rng);
    e.gamma = store.add(prefix + ".ln_gamma", Tensor::Ones(1, config.utterance_hidden));
    e.beta = store.add(prefix + ".ln_beta", Tensor::Zero(1, config.utterance_hidden));
    return e;
  };
  m.context_side_ = make_utterance("enc.utterance");
  m.target_side_ =
      config.share_utterance_weights ? m.context_side_ : make_utterance("enc.target_utterance");

  m.context_lstm_ = numerics::StackedLstm::create(store, "enc.context.lstm", config.utterance_hidden,
                                                  config.context_hidden, config.lstm_layers, true, rng);
  m.context_projection_ = numerics::Linear::create(store, "enc.context_projection",
                                                   config.context_hidden, config.projection_dim, rng);
  m.target_projection_ = numerics::Linear::create(store, "enc.target_projection",
                                                  config.utterance_hidden, config.projection_dim, rng);
  return m;
}

HierarchicalModel HierarchicalModel::attach(const ModelConfig& config, const ParameterStore& store) {
  ParameterStore layout;
  Rng rng(0);
  HierarchicalModel m = create(config, layout, rng);
  if (store.size() < layout.size()) {
    throw Error(ErrorCode::kShapeMismatch, "parameter store is smaller than the model layout");
  }
  // The model occupies the leading ids; heads may follow.
  ParameterStore prefix;
  std::size_t i = 0;
  for (const auto& p : store) {
    if (i++ == layout.size()) break;
    prefix.add(p.name, p.value);
  }
  layout.require_same_layout(prefix);
  return m;
}

const HierarchicalModel::UtteranceEncoder& HierarchicalModel::utterance_encoder(
    UtteranceSide side) const {
  return side == UtteranceSide::kContext ? context_side_ : target_side_;
}

const numerics::StackedLstm& HierarchicalModel::utterance_lstm(UtteranceSide side) const {
  return utterance_encoder(side).lstm;
}

void HierarchicalModel::check_tokens(std::span<const TokenRow> rows) const {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "no utterances to encode");
  const std::size_t len = rows.front().size();
  for (const TokenRow& row : rows) {
    if (row.empty() || row.size() != len) {
      throw Error(ErrorCode::kShapeMismatch, "token rows must share one non-zero length");
    }
    for (int id : row) {
      if (id < 0 || id >= config_.vocab_size) {
        throw Error(ErrorCode::kTokenOutOfRange, "token id " + std::to_string(id) +
                                                     " outside vocabulary of size " +
                                                     std::to_string(config_.vocab_size));
      }
    }
  }
}

Var HierarchicalModel::encode_utterances(Binder& bind, std::span<const TokenRow> rows,
                                         UtteranceSide side) const {
  check_tokens(rows);
  auto& g = bind.graph();
  std::vector<int> lengths(rows.size());
  int steps_needed = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    lengths[r] = corpus::content_length(rows[r]);
    steps_needed = std::max(steps_needed, lengths[r]);
  }
  const Var table = bind(word_table_);
  std::vector<Var> steps;
  steps.reserve(static_cast<std::size_t>(steps_needed));
  std::vector<int> ids(rows.size());
  for (int t = 0; t < steps_needed; ++t) {
    for (std::size_t r = 0; r < rows.size(); ++r) ids[r] = rows[r][static_cast<std::size_t>(t)];
    steps.push_back(ops::gather_rows(g, table, ids));
  }
  const UtteranceEncoder& enc = utterance_encoder(side);
  const auto out = enc.lstm.run(bind, steps, lengths);
  return ops::layer_norm(g, out.final, bind(enc.gamma), bind(enc.beta));
}

Var HierarchicalModel::encode_contexts(Binder& bind, Var utterances,
                                       const std::vector<std::vector<int>>& contexts,
                                       ForwardMode mode) const {
  if (contexts.empty()) throw Error(ErrorCode::kEmptyContext, "no contexts to encode");
  auto& g = bind.graph();
  const auto n_rows = static_cast<int>(g.value(utterances).rows());
  const auto max_ctx = static_cast<std::size_t>(config_.max_context_utterances);
  // Only the most recent max_context_utterances of each context are read.
  std::vector<std::size_t> offsets(contexts.size());
  std::vector<int> lengths(contexts.size());
  int steps_needed = 0;
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    const auto& ctx = contexts[i];
    if (ctx.empty()) throw Error(ErrorCode::kEmptyContext, "context " + std::to_string(i) + " is empty");
    for (int id : ctx) {
      if (id < 0 || id >= n_rows) throw Error(ErrorCode::kInvalidArgument, "context row out of range");
    }
    offsets[i] = ctx.size() > max_ctx ? ctx.size() - max_ctx : 0;
    lengths[i] = static_cast<int>(ctx.size() - offsets[i]);
    steps_needed = std::max(steps_needed, lengths[i]);
  }
  std::vector<Var> steps;
  std::vector<int> ids(contexts.size());
  for (int t = 0; t < steps_needed; ++t) {
    for (std::size_t i = 0; i < contexts.size(); ++i) {
      const int local = std::min(t, lengths[i] - 1);
      ids[i] = contexts[i][offsets[i] + static_cast<std::size_t>(local)];
    }
    steps.push_back(ops::gather_rows(g, utterances, ids));
  }
  Var state = context_lstm_.run(bind, steps, lengths).final;
  if (mode.train && config_.dropout_keep < 1.0) {
    if (mode.rng == nullptr) throw Error(ErrorCode::kInvalidArgument, "training mode needs an rng");
    state = ops::dropout(g, state, config_.dropout_keep, *mode.rng);
  }
  return context_projection_.apply(bind, state);
}

Var HierarchicalModel::project_targets(Binder& bind, Var utterances, ForwardMode mode) const {
  Var x = utterances;
  if (mode.train && config_.dropout_keep < 1.0) {
    if (mode.rng == nullptr) throw Error(ErrorCode::kInvalidArgument, "training mode needs an rng");
    x = ops::dropout(bind.graph(), x, config_.dropout_keep, *mode.rng);
  }
  return target_projection_.apply(bind, x);
}

Vector HierarchicalModel::encode_utterance(const ParameterStore& store, const TokenRow& tokens,
                                           UtteranceSide side) const {
  numerics::Graph g(numerics::GradMode::kDisabled);
  Binder bind(g, store);
  const TokenRow rows[] = {tokens};
  return g.value(encode_utterances(bind, rows, side));
}

Vector HierarchicalModel::encode_context(const ParameterStore& store,
                                         std::span<const Vector> utterances) const {
  if (utterances.empty()) throw Error(ErrorCode::kEmptyContext, "context has no utterances");
  Tensor stacked(static_cast<Eigen::Index>(utterances.size()), config_.utterance_hidden);
  std::vector<int> order(utterances.size());
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    numerics::require_shape(utterances[i], 1, config_.utterance_hidden, "encode_context");
    stacked.row(static_cast<Eigen::Index>(i)) = utterances[i];
    order[i] = static_cast<int>(i);
  }
  numerics::Graph g(numerics::GradMode::kDisabled);
  Binder bind(g, store);
  const Var u = g.constant(std::move(stacked));
  return g.value(encode_contexts(bind, u, {order}, ForwardMode::eval()));
}

Vector HierarchicalModel::embed_target(const ParameterStore& store, const TokenRow& tokens) const {
  numerics::Graph g(numerics::GradMode::kDisabled);
  Binder bind(g, store);
  const TokenRow rows[] = {tokens};
  const Var u = encode_utterances(bind, rows, UtteranceSide::kTarget);
  return g.value(project_targets(bind, u, ForwardMode::eval()));
}

void HierarchicalModel::set_word_embeddings(ParameterStore& store, const Tensor& table) const {
  numerics::require_shape(table, config_.vocab_size, config_.word_dim, "set_word_embeddings");
  numerics::require_finite(table, "set_word_embeddings");
  store[word_table_].value = table;
}

}  // namespace cannedbot::encoder
