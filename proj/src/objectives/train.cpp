// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/objectives/train.hpp"

#include "cannedbot/error.hpp"
#include "cannedbot/numerics/ops.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <numeric>

namespace cannedbot::objectives {

namespace ops = cannedbot::numerics;
using encoder::ForwardMode;
using encoder::TokenRow;
using encoder::UtteranceSide;

Json to_json(const TrainingConfig& c) {
  return {{"margin", c.margin},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"optimizer",
           {{"kind", numerics::to_string(c.optimizer.kind)},
            {"learning_rate", c.optimizer.learning_rate},
            {"lr_decay", c.optimizer.lr_decay},
            {"beta1", c.optimizer.beta1},
            {"beta2", c.optimizer.beta2},
            {"epsilon", c.optimizer.epsilon},
            {"clip_norm", c.optimizer.clip_norm}}},
          {"seed", c.seed},
          {"patience", c.patience},
          {"keep_best", c.keep_best}};
}

TrainingConfig training_config_from_json(const Json& j) {
  TrainingConfig c;
  c.margin = j.value("margin", c.margin);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.seed = j.value("seed", c.seed);
  c.patience = j.value("patience", c.patience);
  c.keep_best = j.value("keep_best", c.keep_best);
  if (j.contains("optimizer")) {
    const Json& o = j["optimizer"];
    if (o.contains("kind")) c.optimizer.kind = numerics::optimizer_kind_from_string(o["kind"].get<std::string>());
    c.optimizer.learning_rate = o.value("learning_rate", c.optimizer.learning_rate);
    c.optimizer.lr_decay = o.value("lr_decay", c.optimizer.lr_decay);
    c.optimizer.beta1 = o.value("beta1", c.optimizer.beta1);
    c.optimizer.beta2 = o.value("beta2", c.optimizer.beta2);
    c.optimizer.epsilon = o.value("epsilon", c.optimizer.epsilon);
    c.optimizer.clip_norm = o.value("clip_norm", c.optimizer.clip_norm);
  }
  return c;
}

Json to_json(const EpochMetrics& m) {
  return {{"epoch", m.epoch}, {"loss", m.loss}, {"r_at_1", m.r_at_1}, {"r_at_3", m.r_at_3},
          {"r_at_10", m.r_at_10}, {"seconds", m.seconds}};
}

namespace {

struct EncodedBatch {
  Var contexts;
  Var targets;
  std::vector<TokenRow> target_rows;
};

/// Encodes each distinct utterance of the batch once.
EncodedBatch encode_batch(Binder& bind, const ResponseModel& model, const LabelledPairs& data,
                          std::span<const std::size_t> batch, ForwardMode mode, bool need_targets) {
  auto& g = bind.graph();
  const auto& enc = model.encoder();
  std::map<TokenRow, int> index;
  std::vector<TokenRow> rows;
  auto intern = [&](std::map<TokenRow, int>& idx, std::vector<TokenRow>& store, const TokenRow& r) {
    const auto [it, inserted] = idx.emplace(r, static_cast<int>(store.size()));
    if (inserted) store.push_back(r);
    return it->second;
  };
  std::vector<std::vector<int>> contexts;
  contexts.reserve(batch.size());
  for (std::size_t p : batch) {
    const auto& pair = data.pairs.at(p);
    std::vector<int> ctx;
    ctx.reserve(pair.context.size());
    for (const auto& u : pair.context) ctx.push_back(intern(index, rows, u.tokens));
    contexts.push_back(std::move(ctx));
  }
  const bool shared = model.config().share_utterance_weights;
  std::vector<int> target_ids;
  std::map<TokenRow, int> target_index;
  std::vector<TokenRow> target_rows;
  EncodedBatch out;
  if (need_targets) {
    for (std::size_t p : batch) {
      const TokenRow& t = data.pairs[p].target.tokens;
      out.target_rows.push_back(t);
      target_ids.push_back(shared ? intern(index, rows, t) : intern(target_index, target_rows, t));
    }
  }
  if (rows.empty()) throw Error(ErrorCode::kEmptyContext, "batch has no context utterances");
  const Var table = enc.encode_utterances(bind, rows, UtteranceSide::kContext);
  out.contexts = enc.encode_contexts(bind, table, contexts, mode);
  if (need_targets) {
    const Var source = shared ? table : enc.encode_utterances(bind, target_rows, UtteranceSide::kTarget);
    out.targets = enc.project_targets(bind, ops::gather_rows(g, source, target_ids), mode);
  }
  return out;
}

std::vector<std::vector<std::size_t>> split_batches(const std::vector<std::size_t>& order, std::size_t size) {
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < order.size(); start += size) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + size)));
  }
  // A trailing single pair cannot form in-batch negatives.
  if (batches.size() > 1 && batches.back().size() < 2) {
    batches[batches.size() - 2].push_back(batches.back().front());
    batches.pop_back();
  }
  return batches;
}

void check_data(const ResponseModel& model, const LabelledPairs& data, const char* what) {
  if (model.objective() != Objective::kMulticlass) return;
  if (data.class_ids.size() != data.pairs.size()) {
    throw Error(ErrorCode::kClassCountMismatch, std::string(what) + ": multiclass training needs one class id per pair");
  }
  for (int id : data.class_ids) {
    if (id < 0 || id >= model.n_classes()) {
      throw Error(ErrorCode::kClassCountMismatch, std::string(what) + ": class id " + std::to_string(id) +
                                                      " outside " + std::to_string(model.n_classes()) + " classes");
    }
  }
}

constexpr std::size_t kHeldOutBlock = 128;

}  // namespace

Var batch_loss(Binder& bind, const ResponseModel& model, const LabelledPairs& data,
               std::span<const std::size_t> batch, Real margin, Rng& rng, bool train) {
  const ForwardMode mode = train ? ForwardMode::training(rng) : ForwardMode::eval();
  auto& g = bind.graph();
  switch (model.objective()) {
    case Objective::kContrastive: {
      if (batch.size() < 2) throw Error(ErrorCode::kBatchTooSmall, "contrastive batch needs N >= 2");
      const auto e = encode_batch(bind, model, data, batch, mode, true);
      return max_margin_loss(g, e.contexts, e.targets, margin);
    }
    case Objective::kBinary: {
      if (batch.size() < 2) throw Error(ErrorCode::kBatchTooSmall, "binary batch needs N >= 2");
      const auto e = encode_batch(bind, model, data, batch, mode, true);
      const auto a = make_binary_assignment(static_cast<int>(batch.size()), rng, [&](int i, int j) {
        return e.target_rows[static_cast<std::size_t>(i)] == e.target_rows[static_cast<std::size_t>(j)];
      });
      const Var shuffled = ops::gather_rows(g, e.targets, a.target_index);
      return binary_loss(bind, model.binary_head(), e.contexts, shuffled, a.labels);
    }
    case Objective::kMulticlass: {
      const auto e = encode_batch(bind, model, data, batch, mode, false);
      std::vector<int> ids;
      for (std::size_t p : batch) ids.push_back(data.class_ids.at(p));
      return multiclass_loss(bind, model.multiclass_head(), e.contexts, ids);
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown objective");
}

std::vector<eval::RankingCase> held_out_cases(const ResponseModel& model, const LabelledPairs& held_out) {
  check_data(model, held_out, "held-out");
  std::vector<std::size_t> order(held_out.pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<eval::RankingCase> cases;
  if (order.empty()) return cases;
  auto blocks = split_batches(order, kHeldOutBlock);
  if (blocks.size() > 1 && blocks.back().size() < kHeldOutBlock / 2) {
    auto last = blocks.back();
    blocks.pop_back();
    blocks.back().insert(blocks.back().end(), last.begin(), last.end());
  }
  for (const auto& block : blocks) {
    numerics::Graph g(numerics::GradMode::kDisabled);
    Binder bind(g, model.params());
    const bool multiclass = model.objective() == Objective::kMulticlass;
    const auto e = encode_batch(bind, model, held_out, block, ForwardMode::eval(), !multiclass);
    const Tensor& c = g.value(e.contexts);
    Tensor scores;
    if (multiclass) {
      scores = ops::softmax_rows(g.value(model.multiclass_head().logits(bind, e.contexts)));
    } else if (model.objective() == Objective::kBinary) {
      scores = model.binary_head().score_matrix(model.params(), c, g.value(e.targets));
    } else {
      scores = Tensor::Ones(c.rows(), c.rows()) -
               g.value(ops::pairwise_cosine_distance(g, e.contexts, e.targets));
    }
    // Content-identical targets collapse into one candidate so that
    // duplicates of the true response cannot outrank it on ties.
    std::vector<int> candidate_of(block.size());
    std::vector<Eigen::Index> columns;
    if (!multiclass) {
      std::map<TokenRow, int> seen;
      for (std::size_t i = 0; i < block.size(); ++i) {
        const auto [it, inserted] = seen.emplace(e.target_rows[i], static_cast<int>(columns.size()));
        if (inserted) columns.push_back(static_cast<Eigen::Index>(i));
        candidate_of[i] = it->second;
      }
    }
    for (std::size_t i = 0; i < block.size(); ++i) {
      eval::RankingCase rc;
      const auto row = scores.row(static_cast<Eigen::Index>(i));
      if (multiclass) {
        rc.scores.assign(row.data(), row.data() + row.size());
        rc.true_index = held_out.class_ids[block[i]];
      } else {
        for (Eigen::Index col : columns) rc.scores.push_back(row(col));
        rc.true_index = candidate_of[i];
      }
      cases.push_back(std::move(rc));
    }
  }
  return cases;
}

Real evaluate_loss(const ResponseModel& model, const LabelledPairs& data, const TrainingConfig& config) {
  if (data.pairs.empty()) throw Error(ErrorCode::kEmptyDataset, "no pairs");
  check_data(model, data, "training");
  std::vector<std::size_t> order(data.pairs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed);
  Real total = 0.0;
  for (const auto& batch : split_batches(order, static_cast<std::size_t>(config.batch_size))) {
    numerics::Graph g(numerics::GradMode::kDisabled);
    Binder bind(g, model.params());
    total += g.value(batch_loss(bind, model, data, batch, config.margin, rng, false))(0, 0) *
             static_cast<Real>(batch.size());
  }
  return total / static_cast<Real>(data.pairs.size());
}

namespace {

double recall_from_ranks(const std::vector<int>& ranks, int k) {
  std::size_t hits = 0;
  for (int r : ranks) hits += r <= k;
  return ranks.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(ranks.size());
}

}  // namespace

TrainResult train(ResponseModel& model, const LabelledPairs& train_data, const LabelledPairs& held_out,
                  const TrainingConfig& config) {
  if (train_data.pairs.empty()) throw Error(ErrorCode::kEmptyDataset, "no training pairs");
  if (config.batch_size < 2) throw Error(ErrorCode::kBatchTooSmall, "batch_size must be >= 2");
  if (config.epochs < 1) throw Error(ErrorCode::kInvalidArgument, "epochs must be >= 1");
  check_data(model, train_data, "training");
  check_data(model, held_out, "held-out");
  if (model.objective() != Objective::kMulticlass && train_data.pairs.size() < 2) {
    throw Error(ErrorCode::kBatchTooSmall, "need at least 2 training pairs");
  }
  if (!config.out_dir.empty()) std::filesystem::create_directories(config.out_dir);

  numerics::Optimizer optimizer(config.optimizer);
  Rng order_rng(config.seed);
  Rng step_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train_data.pairs.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  double best_r3 = -1.0;
  int since_best = 0;
  ParameterStore best = model.params();
  std::vector<Json> log;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    order_rng.shuffle(order);
    Real total = 0.0;
    for (const auto& batch : split_batches(order, static_cast<std::size_t>(config.batch_size))) {
      numerics::Graph g;
      Binder bind(g, model.params());
      const Var loss = batch_loss(bind, model, train_data, batch, config.margin, step_rng, true);
      total += g.value(loss)(0, 0) * static_cast<Real>(batch.size());
      g.backward(loss);
      optimizer.step(model.params());
    }
    optimizer.end_epoch();

    EpochMetrics m;
    m.epoch = epoch;
    m.loss = total / static_cast<Real>(train_data.pairs.size());
    if (!held_out.pairs.empty()) {
      std::vector<int> ranks;
      for (const auto& c : held_out_cases(model, held_out)) ranks.push_back(eval::true_rank(c));
      m.r_at_1 = recall_from_ranks(ranks, 1);
      m.r_at_3 = recall_from_ranks(ranks, 3);
      m.r_at_10 = recall_from_ranks(ranks, 10);
    }
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.epochs.push_back(m);
    log.push_back(to_json(m));

    if (!config.out_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch-%03d.ckpt", epoch);
      model.save(config.out_dir / name);
      write_jsonl(config.out_dir / "metrics.jsonl", log);
    }

    const bool improved = held_out.pairs.empty() || m.r_at_3 > best_r3;
    if (improved) {
      best_r3 = m.r_at_3;
      result.best_epoch = epoch;
      since_best = 0;
      if (config.keep_best) best = model.params();
    } else if (config.patience > 0 && ++since_best >= config.patience) {
      break;
    }
  }
  if (config.keep_best && !held_out.pairs.empty()) model.params() = best;
  if (!config.out_dir.empty()) model.save(config.out_dir / "model.ckpt");
  return result;
}

}  // namespace cannedbot::objectives
