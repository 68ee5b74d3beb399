// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/encoder/skipthought.hpp"

#include "cannedbot/corpus/pairs.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/numerics/ops.hpp"

#include <algorithm>
#include <numeric>

namespace cannedbot::encoder {

namespace ops = cannedbot::numerics;

void SkipThoughtConfig::validate() const {
  if (vocab_size < 1 || word_dim < 1 || hidden < 1) {
    throw Error(ErrorCode::kInvalidArgument, "skip-thought dims must be >= 1");
  }
  if (utterance_len < 2) throw Error(ErrorCode::kInvalidArgument, "utterance_len must be >= 2");
}

Json to_json(const SkipThoughtConfig& c) {
  return {{"vocab_size", c.vocab_size}, {"word_dim", c.word_dim}, {"hidden", c.hidden},
          {"utterance_len", c.utterance_len}, {"seed", c.seed}};
}

SkipThoughtConfig skipthought_config_from_json(const Json& j) {
  SkipThoughtConfig c;
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.word_dim = j.value("word_dim", c.word_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.utterance_len = j.value("utterance_len", c.utterance_len);
  c.seed = j.value("seed", c.seed);
  return c;
}

int SkipThoughtWindow::neighbor_count() const {
  return static_cast<int>(std::count_if(neighbors.begin(), neighbors.end(),
                                        [](const auto& n) { return n.has_value(); }));
}

std::vector<SkipThoughtWindow> make_skipthought_windows(const std::vector<corpus::Dialogue>& dialogues,
                                                        const corpus::Vocabulary& vocab,
                                                        int utterance_len) {
  std::vector<SkipThoughtWindow> windows;
  for (const corpus::Dialogue& d : dialogues) {
    std::vector<TokenRow> rows;
    rows.reserve(d.utterances.size());
    for (const auto& u : d.utterances) rows.push_back(vocab.encode_padded(u.text, utterance_len));
    const auto n = static_cast<long>(rows.size());
    for (long i = 0; i < n; ++i) {
      if (d.utterances[static_cast<std::size_t>(i)].speaker != corpus::Speaker::kAgent) continue;
      SkipThoughtWindow w;
      w.center = rows[static_cast<std::size_t>(i)];
      for (std::size_t s = 0; s < kSkipThoughtOffsets.size(); ++s) {
        const long j = i + kSkipThoughtOffsets[s];
        if (j >= 0 && j < n) w.neighbors[s] = rows[static_cast<std::size_t>(j)];
      }
      if (w.neighbor_count() > 0) windows.push_back(std::move(w));
    }
  }
  return windows;
}

SkipThoughtModel SkipThoughtModel::create(const SkipThoughtConfig& config, ParameterStore& store,
                                          Rng& rng) {
  config.validate();
  SkipThoughtModel m;
  m.config_ = config;
  m.word_table_ = store.add("st.word_embedding",
                            numerics::uniform_tensor(config.vocab_size, config.word_dim,
                                                     numerics::kRecurrentInitBound, rng));
  m.encoder_ = numerics::StackedLstm::create(store, "st.encoder", config.word_dim, config.hidden, 1,
                                             false, rng);
  m.prev_decoder_ = numerics::StackedLstm::create(store, "st.prev_decoder", config.word_dim,
                                                  config.hidden, 1, false, rng);
  m.next_decoder_ = numerics::StackedLstm::create(store, "st.next_decoder", config.word_dim,
                                                  config.hidden, 1, false, rng);
  m.prev_out_ = numerics::Linear::create(store, "st.prev_out", config.hidden, config.vocab_size, rng);
  m.next_out_ = numerics::Linear::create(store, "st.next_out", config.hidden, config.vocab_size, rng);
  return m;
}

SkipThoughtModel SkipThoughtModel::attach(const SkipThoughtConfig& config, const ParameterStore& store) {
  ParameterStore layout;
  Rng rng(0);
  SkipThoughtModel m = create(config, layout, rng);
  layout.require_same_layout(store);
  return m;
}

namespace {

void check_rows(std::span<const TokenRow> rows, int vocab_size) {
  for (const TokenRow& row : rows) {
    if (row.empty()) throw Error(ErrorCode::kInvalidArgument, "empty token row");
    for (int id : row) {
      if (id < 0 || id >= vocab_size) {
        throw Error(ErrorCode::kTokenOutOfRange, "token id " + std::to_string(id) + " out of range");
      }
    }
  }
}

}  // namespace

Var SkipThoughtModel::encode(Binder& bind, std::span<const TokenRow> rows) const {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "no utterances to encode");
  check_rows(rows, config_.vocab_size);
  auto& g = bind.graph();
  std::vector<int> lengths(rows.size());
  int steps_needed = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    lengths[r] = corpus::content_length(rows[r]);
    steps_needed = std::max(steps_needed, lengths[r]);
  }
  const Var table = bind(word_table_);
  std::vector<Var> steps;
  std::vector<int> ids(rows.size());
  for (int t = 0; t < steps_needed; ++t) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      ids[r] = t < static_cast<int>(row.size()) ? row[static_cast<std::size_t>(t)]
                                                : corpus::Vocabulary::kEmpty;
    }
    steps.push_back(ops::gather_rows(g, table, ids));
  }
  return encoder_.run(bind, steps, lengths).final;
}

Var SkipThoughtModel::decode_loss(Binder& bind, Var encoded, std::span<const SkipThoughtWindow> windows,
                                  std::size_t slot) const {
  auto& g = bind.graph();
  std::vector<int> members;
  std::vector<const TokenRow*> targets;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    if (windows[w].neighbors[slot]) {
      members.push_back(static_cast<int>(w));
      targets.push_back(&*windows[w].neighbors[slot]);
    }
  }
  if (members.empty()) return Var{};
  const bool next = kSkipThoughtOffsets[slot] > 0;
  const numerics::StackedLstm& decoder = next ? next_decoder_ : prev_decoder_;
  const numerics::Linear& out = next ? next_out_ : prev_out_;

  std::vector<int> lengths(members.size());
  int steps_needed = 0;
  for (std::size_t r = 0; r < members.size(); ++r) {
    lengths[r] = corpus::content_length(*targets[r]);
    steps_needed = std::max(steps_needed, lengths[r]);
  }
  const Var table = bind(word_table_);
  std::vector<Var> inputs;
  std::vector<int> ids(members.size());
  for (int t = 0; t < steps_needed; ++t) {
    for (std::size_t r = 0; r < members.size(); ++r) {
      ids[r] = t == 0 || t > lengths[r] ? corpus::Vocabulary::kEos
                                        : (*targets[r])[static_cast<std::size_t>(t - 1)];
    }
    inputs.push_back(ops::gather_rows(g, table, ids));
  }
  const Var init = ops::gather_rows(g, encoded, members);
  const auto run = decoder.run(bind, inputs, lengths, init);

  Var total;
  std::vector<int> step_targets(members.size());
  for (int t = 0; t < steps_needed; ++t) {
    for (std::size_t r = 0; r < members.size(); ++r) {
      step_targets[r] = t < lengths[r] ? (*targets[r])[static_cast<std::size_t>(t)] : -1;
    }
    const Var logits = out.apply(bind, run.outputs[static_cast<std::size_t>(t)]);
    const Var term = ops::softmax_cross_entropy(g, logits, step_targets, ops::Reduction::kSum);
    total = total.valid() ? ops::add(g, total, term) : term;
  }
  return total;
}

Var SkipThoughtModel::loss(Binder& bind, std::span<const SkipThoughtWindow> windows) const {
  if (windows.empty()) throw Error(ErrorCode::kInvalidArgument, "no windows");
  std::vector<TokenRow> centers;
  centers.reserve(windows.size());
  for (const auto& w : windows) {
    if (w.neighbor_count() == 0) throw Error(ErrorCode::kWindowTooShort, "window has no neighbours");
    for (const auto& n : w.neighbors) {
      if (n) check_rows(std::span<const TokenRow>(&*n, 1), config_.vocab_size);
    }
    centers.push_back(w.center);
  }
  const Var encoded = encode(bind, centers);
  Var total;
  for (std::size_t slot = 0; slot < kSkipThoughtOffsets.size(); ++slot) {
    const Var term = decode_loss(bind, encoded, windows, slot);
    if (!term.valid()) continue;
    total = total.valid() ? ops::add(bind.graph(), total, term) : term;
  }
  return total;
}

Real SkipThoughtModel::train_step(ParameterStore& store, numerics::Optimizer& optimizer,
                                  std::span<const SkipThoughtWindow> windows) const {
  numerics::Graph g;
  Binder bind(g, store);
  const Var l = loss(bind, windows);
  const Real value = g.value(l)(0, 0);
  g.backward(l);
  optimizer.step(store);
  return value;
}

Vector SkipThoughtModel::embed(const ParameterStore& store, const TokenRow& tokens) const {
  numerics::Graph g(numerics::GradMode::kDisabled);
  Binder bind(g, store);
  const TokenRow rows[] = {tokens};
  return g.value(encode(bind, rows));
}

std::vector<Real> train_skipthought(const SkipThoughtModel& model, ParameterStore& store,
                                    const std::vector<SkipThoughtWindow>& windows,
                                    const SkipThoughtTrainOptions& options) {
  if (windows.empty()) throw Error(ErrorCode::kEmptyDataset, "no skip-thought windows");
  if (options.batch_size < 1) throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  numerics::Optimizer optimizer(options.optimizer);
  Rng rng(options.seed);
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Real> epoch_losses;
  const auto bs = static_cast<std::size_t>(options.batch_size);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    Real total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      std::vector<SkipThoughtWindow> batch;
      for (std::size_t i = start; i < std::min(order.size(), start + bs); ++i) {
        batch.push_back(windows[order[i]]);
      }
      total += model.train_step(store, optimizer, batch);
    }
    optimizer.end_epoch();
    epoch_losses.push_back(total / static_cast<Real>(windows.size()));
  }
  return epoch_losses;
}

}  // namespace cannedbot::encoder
