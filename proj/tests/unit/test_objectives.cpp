// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "cannedbot/corpus/synthetic.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/numerics/grad_check.hpp"
#include "cannedbot/numerics/ops.hpp"
#include "cannedbot/objectives/train.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>

using namespace cannedbot;
using namespace cannedbot::objectives;
namespace ops = cannedbot::numerics;

namespace {

Tensor random_tensor(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Tensor t(r, c);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-1.0, 1.0);
  return t;
}

Real cosine_distance(const Vector& a, const Vector& b) { return 1.0 - a.dot(b) / (a.norm() * b.norm()); }

Real naive_loss(const Tensor& c, const Tensor& t, Real m) {
  const auto n = c.rows();
  Real total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real pos = cosine_distance(c.row(i), t.row(i));
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) total += std::max(0.0, m + pos - cosine_distance(c.row(i), t.row(j)));
    }
  }
  return total / static_cast<Real>(n);
}

Real margin_loss_value(const Tensor& c, const Tensor& t, Real m) {
  Graph g(numerics::GradMode::kDisabled);
  return g.value(max_margin_loss(g, g.constant(c), g.constant(t), m))(0, 0);
}

// Unit vectors whose Gram matrix is `gram` (rows of its Cholesky factor).
Tensor vectors_with_gram(const Tensor& gram) {
  Eigen::LLT<Tensor> llt(gram);
  REQUIRE(llt.info() == Eigen::Success);
  return llt.matrixL();
}

encoder::ModelConfig tiny_config(std::size_t vocab_size, Real keep = 1.0) {
  encoder::ModelConfig c;
  c.vocab_size = static_cast<int>(vocab_size);
  c.word_dim = 6;
  c.utterance_hidden = 6;
  c.context_hidden = 6;
  c.projection_dim = 5;
  c.lstm_layers = 1;
  c.dropout_keep = keep;
  c.utterance_len = 10;
  c.max_context_utterances = 4;
  c.seed = 11;
  return c;
}

struct SyntheticData {
  corpus::Vocabulary vocab;
  LabelledPairs pairs;
  int n_classes = 0;
};

SyntheticData synthetic_data(int n_intents, int n_dialogues, std::uint64_t seed = 7) {
  const auto syn = corpus::generate_synthetic_corpus(
      {.n_intents = n_intents, .n_dialogues = n_dialogues, .noise = 0.0, .seed = seed});
  SyntheticData d;
  d.vocab = corpus::Vocabulary::build(syn.dialogues);
  d.pairs.pairs = corpus::make_pairs(syn.dialogues, d.vocab, {.utterance_len = 10, .max_context_utterances = 4});
  for (const auto& p : d.pairs.pairs) d.pairs.class_ids.push_back(*p.target.intent);
  d.n_classes = n_intents;
  return d;
}

ResponseModel make_model(Objective o, const SyntheticData& d, Real keep = 1.0) {
  return ResponseModel::create(o, tiny_config(d.vocab.size(), keep), d.vocab,
                               {.multiclass_hidden = {7, 7}, .n_classes = d.n_classes});
}

template <typename F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

constexpr Objective kAllObjectives[] = {Objective::kContrastive, Objective::kBinary, Objective::kMulticlass};

}  // namespace

TEST_CASE("margin loss of the hand-worked two-pair batch is 0.20005") {
  // cos(c1,p1)=0.5 cos(c1,p2)=0.9 cos(c2,p2)=0.8 cos(c2,p1)=0.1
  Tensor gram(4, 4);
  bool found = false;
  for (int a = -9; a <= 9 && !found; ++a) {
    for (int b = -9; b <= 9 && !found; ++b) {
      // order: c1, c2, p1, p2
      gram << 1, a / 10.0, 0.5, 0.9, a / 10.0, 1, 0.1, 0.8, 0.5, 0.1, 1, b / 10.0, 0.9, 0.8, b / 10.0, 1;
      found = Eigen::LLT<Tensor>(gram).info() == Eigen::Success;
    }
  }
  REQUIRE(found);
  const Tensor v = vectors_with_gram(gram);
  const Tensor c = v.topRows(2);
  const Tensor t = v.bottomRows(2);
  CHECK(cosine_distance(c.row(0), t.row(0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cosine_distance(c.row(1), t.row(0)) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(margin_loss_value(c, t, 0.0001) == doctest::Approx(0.20005).epsilon(1e-9));
}

TEST_CASE("negatives exactly at the margin contribute nothing") {
  const Real m = 1e-4;
  const Real angle = std::acos(1.0 - m);
  Tensor c(2, 2);
  c << 1.0, 0.0, std::cos(angle), std::sin(angle);
  CHECK(std::abs(margin_loss_value(c, c, m)) < 1e-12);
  // Pulling the negatives closer violates the margin.
  Tensor near = c;
  near.row(1) << std::cos(angle / 2), std::sin(angle / 2);
  CHECK(margin_loss_value(near, near, m) > 0.0);
}

TEST_CASE("vectorized margin loss equals the triple loop, is non-negative and scale invariant") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(9));
    const int d = 1 + static_cast<int>(rng.index(6));
    const Real m = trial % 3 == 0 ? 1e-4 : rng.uniform(0.01, 1.0);
    const Tensor c = random_tensor(n, d, rng);
    const Tensor t = random_tensor(n, d, rng);
    const Real loss = margin_loss_value(c, t, m);
    REQUIRE(loss == doctest::Approx(naive_loss(c, t, m)).epsilon(1e-6));
    REQUIRE(loss >= 0.0);
    const Real s = rng.uniform(0.1, 50.0);
    REQUIRE(margin_loss_value(c * s, t * (s * 0.5), m) == doctest::Approx(loss).epsilon(1e-9));
  }
}

TEST_CASE("margin loss is zero when every triplet satisfies the margin") {
  // Orthogonal one-hot embeddings: D(c_i, p_i) = 0, D(c_i, p_n) = 1.
  const Tensor c = Tensor::Identity(5, 5);
  CHECK(margin_loss_value(c, c, 0.5) == 0.0);
  CHECK(margin_loss_value(c, c, 1.0) == 0.0);
  CHECK(margin_loss_value(c, c, 1.5) > 0.0);
}

TEST_CASE("margin loss input validation") {
  Graph g;
  Rng rng(1);
  const Var one = g.constant(random_tensor(1, 3, rng));
  const Var two = g.constant(random_tensor(2, 3, rng));
  const Var wide = g.constant(random_tensor(2, 4, rng));
  CHECK(error_code_of([&] { max_margin_loss(g, one, one); }) == ErrorCode::kBatchTooSmall);
  CHECK(error_code_of([&] { max_margin_loss(g, two, wide); }) == ErrorCode::kShapeMismatch);
  CHECK(error_code_of([&] { max_margin_loss(g, two, two, 0.0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("binary assignment halves every batch into positives and deranged negatives") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const auto a = make_binary_assignment(128, rng);
    int negatives = 0;
    for (int i = 0; i < 128; ++i) {
      if (a.labels[i] == 0.0) {
        ++negatives;
        REQUIRE(a.target_index[i] != i);
      } else {
        REQUIRE(a.target_index[i] == i);
      }
    }
    REQUIRE(negatives == 64);
    auto sorted = a.target_index;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> identity(128);
    std::iota(identity.begin(), identity.end(), 0);
    REQUIRE(sorted == identity);
  }
}

TEST_CASE("binary assignment preserves the target multiset for every N >= 4") {
  Rng rng(5);
  for (int n = 4; n <= 40; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto a = make_binary_assignment(n, rng);
      auto sorted = a.target_index;
      std::sort(sorted.begin(), sorted.end());
      std::vector<int> identity(static_cast<std::size_t>(n));
      std::iota(identity.begin(), identity.end(), 0);
      REQUIRE(sorted == identity);
      REQUIRE(std::count(a.labels.begin(), a.labels.end(), 0.0) == n / 2);
    }
  }
}

TEST_CASE("two-pair binary batch has one positive and one foreign negative") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto a = make_binary_assignment(2, rng);
    REQUIRE(std::count(a.labels.begin(), a.labels.end(), 1.0) == 1);
    const int neg = a.labels[0] == 0.0 ? 0 : 1;
    REQUIRE(a.target_index[neg] == 1 - neg);
  }
  Rng rng(0);
  CHECK(error_code_of([&] { make_binary_assignment(1, rng); }) == ErrorCode::kBatchTooSmall);
}

TEST_CASE("binary assignment is deterministic and avoids content-identical targets") {
  Rng a(9), b(9);
  const auto x = make_binary_assignment(64, a);
  const auto y = make_binary_assignment(64, b);
  CHECK(x.target_index == y.target_index);
  CHECK(x.labels == y.labels);

  // Targets come in 8 content groups; a negative should never see its own text.
  auto group = [](int i) { return i % 8; };
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto d = make_binary_assignment(32, rng, [&](int i, int j) { return group(i) == group(j); });
    for (int i = 0; i < 32; ++i) {
      if (d.labels[i] == 0.0) REQUIRE(group(d.target_index[i]) != group(i));
    }
  }
}

TEST_CASE("make_binary_batch shuffles targets and keeps contexts") {
  Batch batch;
  for (int i = 0; i < 10; ++i) {
    batch.contexts.push_back({{i, 0}});
    batch.targets.push_back({100 + i, 0});
  }
  Rng rng(4);
  const Batch out = make_binary_batch(batch, rng);
  CHECK(out.contexts == batch.contexts);
  CHECK(out.labels.size() == 10);
  auto before = batch.targets;
  auto after = out.targets;
  std::sort(before.begin(), before.end());
  std::sort(after.begin(), after.end());
  CHECK(before == after);
  for (int i = 0; i < 10; ++i) CHECK((out.labels[i] == 1.0) == (out.targets[i] == batch.targets[i]));
}

TEST_CASE("binary loss is ln 2 at score one half and vanishes for confident positives") {
  ParameterStore store;
  Rng rng(2);
  const auto head = BinaryHead::create(store, 4, rng);
  store[head.linear.weight].value.setZero();
  if (head.linear.bias) store[*head.linear.bias].value.setZero();
  const Tensor c = random_tensor(3, 4, rng);
  const Tensor t = random_tensor(3, 4, rng);
  for (Real label : {0.0, 1.0}) {
    Graph g;
    Binder bind(g, store);
    const Var loss = binary_loss(bind, head, g.constant(c), g.constant(t), {label, label, label});
    CHECK(g.value(loss)(0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  CHECK(head.score(store, c.row(0), t.row(0)) == 0.5);
  REQUIRE(head.linear.bias);
  store[*head.linear.bias].value(0, 0) = 40.0;
  Graph g;
  Binder bind(g, store);
  CHECK(g.value(binary_loss(bind, head, g.constant(c), g.constant(t), {1.0, 1.0, 1.0}))(0, 0) < 1e-15);
}

TEST_CASE("binary score matrix agrees with pairwise scores") {
  ParameterStore store;
  Rng rng(3);
  const auto head = BinaryHead::create(store, 5, rng);
  const Tensor c = random_tensor(4, 5, rng);
  const Tensor t = random_tensor(6, 5, rng);
  const Tensor s = head.score_matrix(store, c, t);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 6; ++j) CHECK(s(i, j) == doctest::Approx(head.score(store, c.row(i), t.row(j))).epsilon(1e-12));
  }
}

TEST_CASE("multiclass head outputs a distribution") {
  ParameterStore store;
  Rng rng(4);
  const auto head = MulticlassHead::create(store, 5, {8, 8}, 7, rng);
  CHECK(head.layers.size() == 3);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = random_tensor(1, 5, rng) * 3.0;
    const Vector p = head.probabilities(store, x);
    CHECK(p.size() == 7);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.minCoeff() > 0.0);
    CHECK(p.maxCoeff() < 1.0);
  }
  auto& last = head.layers.back();
  store[last.weight].value.setZero();
  if (last.bias) store[*last.bias].value.setZero();
  const Vector uniform = head.probabilities(store, random_tensor(1, 5, rng));
  for (Eigen::Index k = 0; k < uniform.size(); ++k) CHECK(uniform(k) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("softmax is invariant to a constant logit shift") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor logits = random_tensor(3, 9, rng) * 10.0;
    const Tensor shifted = (logits.array() + rng.uniform(-100.0, 100.0)).matrix();
    CHECK((ops::softmax_rows(logits) - ops::softmax_rows(shifted)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("multiclass loss rejects class ids outside the head") {
  ParameterStore store;
  Rng rng(6);
  const auto head = MulticlassHead::create(store, 3, {4}, 5, rng);
  Graph g;
  Binder bind(g, store);
  const Var c = g.constant(random_tensor(2, 3, rng));
  CHECK(error_code_of([&] { multiclass_loss(bind, head, c, {0, 5}); }) == ErrorCode::kClassCountMismatch);
  CHECK(error_code_of([&] { multiclass_loss(bind, head, c, {0}); }) == ErrorCode::kShapeMismatch);
  CHECK(g.value(multiclass_loss(bind, head, c, {0, 4}))(0, 0) > 0.0);
}

TEST_CASE("full objectives pass finite-difference gradient checks") {
  const auto data = synthetic_data(6, 4);
  std::vector<std::size_t> batch(6);
  std::iota(batch.begin(), batch.end(), 0);
  for (Objective o : kAllObjectives) {
    CAPTURE(to_string(o));
    auto model = make_model(o, data);
    // A larger margin keeps triplets away from the hinge kinks.
    const Real margin = o == Objective::kContrastive ? 0.5 : kDefaultMargin;
    const numerics::LossBuilder build = [&](Binder& bind) {
      Rng rng(21);
      return batch_loss(bind, model, data.pairs, batch, margin, rng, false);
    };
    const auto report = numerics::grad_check(model.params(), build, {.max_coordinates = 400, .seed = 3});
    CAPTURE(report.worst_parameter);
    CHECK(report.coordinates_checked > 0);
    CHECK(report.max_relative_error < 1e-4);
    CHECK(report.passed);
  }
}

TEST_CASE("batch loss needs at least two pairs for in-batch objectives") {
  const auto data = synthetic_data(6, 2);
  const std::vector<std::size_t> one{0};
  for (Objective o : {Objective::kContrastive, Objective::kBinary}) {
    const auto model = make_model(o, data);
    Graph g;
    Binder bind(g, model.params());
    Rng rng(1);
    CHECK(error_code_of([&] { batch_loss(bind, model, data.pairs, one, kDefaultMargin, rng); }) ==
          ErrorCode::kBatchTooSmall);
  }
}

TEST_CASE("dedup of shared utterances does not change the loss") {
  // Same pair repeated: each distinct row is encoded once, but each pair still contributes.
  const auto data = synthetic_data(6, 3);
  auto model = make_model(Objective::kMulticlass, data);
  const std::vector<std::size_t> single{2};
  const std::vector<std::size_t> twice{2, 2};
  Graph g1(numerics::GradMode::kDisabled), g2(numerics::GradMode::kDisabled);
  Binder b1(g1, std::as_const(model).params()), b2(g2, std::as_const(model).params());
  Rng r1(1), r2(1);
  const Real a = g1.value(batch_loss(b1, model, data.pairs, single, kDefaultMargin, r1, false))(0, 0);
  const Real b = g2.value(batch_loss(b2, model, data.pairs, twice, kDefaultMargin, r2, false))(0, 0);
  CHECK(a == doctest::Approx(b).epsilon(1e-14));
}

TEST_CASE("training lowers the loss by epoch 5 for every objective") {
  const auto data = synthetic_data(8, 40);
  for (Objective o : kAllObjectives) {
    CAPTURE(to_string(o));
    auto model = make_model(o, data, 0.9);
    TrainingConfig config;
    config.batch_size = 16;
    config.epochs = 5;
    config.patience = 0;
    config.margin = 0.1;
    config.optimizer = {numerics::OptimizerKind::kAdam, 0.01};
    const auto result = train(model, data.pairs, {}, config);
    REQUIRE(result.epochs.size() == 5);
    CHECK(result.epochs[4].loss < result.epochs[0].loss);
    CHECK(std::isfinite(result.epochs[4].loss));
  }
}

TEST_CASE("rerunning training with the same seed reproduces the epoch-1 loss") {
  const auto data = synthetic_data(8, 20);
  for (Objective o : kAllObjectives) {
    CAPTURE(to_string(o));
    TrainingConfig config;
    config.batch_size = 8;
    config.epochs = 1;
    config.seed = 42;
    auto a = make_model(o, data, 0.5);
    auto b = make_model(o, data, 0.5);
    const Real la = train(a, data.pairs, {}, config).epochs[0].loss;
    const Real lb = train(b, data.pairs, {}, config).epochs[0].loss;
    CHECK(std::round(la * 1e6) == std::round(lb * 1e6));
    CHECK(a.checkpoint_id() == b.checkpoint_id());
  }
}

TEST_CASE("training errors") {
  const auto data = synthetic_data(6, 4);
  auto model = make_model(Objective::kMulticlass, data);
  CHECK(error_code_of([&] { train(model, {}, {}, {}); }) == ErrorCode::kEmptyDataset);
  LabelledPairs unlabelled{data.pairs.pairs, {}};
  CHECK(error_code_of([&] { train(model, unlabelled, {}, {}); }) == ErrorCode::kClassCountMismatch);
  LabelledPairs out_of_range = data.pairs;
  out_of_range.class_ids[0] = 99;
  CHECK(error_code_of([&] { train(model, out_of_range, {}, {}); }) == ErrorCode::kClassCountMismatch);
}

TEST_CASE("held-out ranking blocks and class cases") {
  const auto data = synthetic_data(6, 30);
  const auto contrastive = make_model(Objective::kContrastive, data);
  const auto cases = held_out_cases(contrastive, data.pairs);
  REQUIRE(cases.size() == data.pairs.pairs.size());
  std::set<std::vector<int>> distinct;
  for (std::size_t i = 0; i < 128; ++i) distinct.insert(data.pairs.pairs[i].target.tokens);
  CHECK(cases[0].scores.size() == distinct.size());
  for (const auto& c : cases) CHECK(c.true_index < static_cast<int>(c.scores.size()));

  // Repeats of one pair give a single candidate that is always ranked first.
  LabelledPairs repeated;
  for (int i = 0; i < 5; ++i) repeated.pairs.push_back(data.pairs.pairs[3]);
  for (const auto& c : held_out_cases(contrastive, repeated)) {
    CHECK(c.scores.size() == 1);
    CHECK(c.true_index == 0);
  }

  const auto multiclass = make_model(Objective::kMulticlass, data);
  const auto mc = held_out_cases(multiclass, data.pairs);
  for (std::size_t i = 0; i < mc.size(); ++i) {
    CHECK(mc[i].scores.size() == static_cast<std::size_t>(data.n_classes));
    CHECK(mc[i].true_index == data.pairs.class_ids[i]);
  }
}

TEST_CASE("training writes metrics and checkpoints and keeps the best epoch") {
  const auto data = synthetic_data(8, 30);
  LabelledPairs train_split, held;
  for (std::size_t i = 0; i < data.pairs.pairs.size(); ++i) {
    auto& dst = i % 5 == 0 ? held : train_split;
    dst.pairs.push_back(data.pairs.pairs[i]);
    dst.class_ids.push_back(data.pairs.class_ids[i]);
  }
  const auto dir = std::filesystem::temp_directory_path() / "cannedbot_test_train";
  std::filesystem::remove_all(dir);
  auto model = make_model(Objective::kContrastive, data, 0.8);
  TrainingConfig config;
  config.batch_size = 16;
  config.epochs = 3;
  config.margin = 0.1;
  config.optimizer = {numerics::OptimizerKind::kAdam, 0.01};
  config.out_dir = dir;
  const auto result = train(model, train_split, held, config);
  CHECK(std::filesystem::exists(dir / "model.ckpt"));
  CHECK(std::filesystem::exists(dir / "epoch-001.ckpt"));
  std::vector<Json> lines;
  read_jsonl(dir / "metrics.jsonl", [&](Json j) { lines.push_back(std::move(j)); });
  REQUIRE(lines.size() == result.epochs.size());
  for (const auto& line : lines) {
    for (const char* key : {"epoch", "loss", "r_at_1", "r_at_3", "r_at_10"}) CHECK(line.contains(key));
  }
  // The retained parameters reproduce the best epoch's held-out R@3.
  const auto& best = result.epochs[static_cast<std::size_t>(result.best_epoch - 1)];
  const auto cases = held_out_cases(model, held);
  CHECK(eval::recall_at_k(cases, 3) == doctest::Approx(best.r_at_3).epsilon(1e-12));
  for (const auto& e : result.epochs) CHECK(e.r_at_3 <= best.r_at_3);
  const auto reloaded = ResponseModel::load(dir / "model.ckpt");
  CHECK(reloaded.checkpoint_id() == model.checkpoint_id());
  std::filesystem::remove_all(dir);
}

TEST_CASE("response model checkpoints round-trip") {
  const auto data = synthetic_data(6, 5);
  const auto dir = std::filesystem::temp_directory_path() / "cannedbot_test_ckpt";
  std::filesystem::create_directories(dir);
  for (Objective o : kAllObjectives) {
    CAPTURE(to_string(o));
    const auto model = make_model(o, data);
    const auto path = dir / (std::string(to_string(o)) + ".ckpt");
    model.save(path);
    const auto back = ResponseModel::load(path);
    CHECK(back.objective() == o);
    CHECK(back.checkpoint_id() == model.checkpoint_id());
    CHECK(back.vocab() == model.vocab());
    CHECK(back.n_classes() == model.n_classes());
    const Vector u = model.utterance_embedding("hello how can i help you");
    CHECK(back.utterance_embedding("hello how can i help you") == u);
    const std::vector<Vector> ctx{u};
    const Vector c = back.context_embedding(ctx);
    CHECK(c == model.context_embedding(ctx));
    if (o == Objective::kBinary) {
      const Vector t = model.target_embedding("goodbye");
      CHECK(back.binary_score(c, t) == model.binary_score(c, t));
    }
    if (o == Objective::kMulticlass) CHECK(back.class_probabilities(c) == model.class_probabilities(c));
  }
  CHECK(objective_from_string("binary") == Objective::kBinary);
  CHECK(error_code_of([] { objective_from_string("dam"); }) == ErrorCode::kInvalidArgument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("training config round-trips through JSON") {
  TrainingConfig c;
  c.margin = 0.25;
  c.batch_size = 64;
  c.optimizer = {numerics::OptimizerKind::kAdam, 0.003};
  c.patience = 0;
  const auto back = training_config_from_json(to_json(c));
  CHECK(back.margin == 0.25);
  CHECK(back.batch_size == 64);
  CHECK(back.optimizer.kind == numerics::OptimizerKind::kAdam);
  CHECK(back.optimizer.learning_rate == 0.003);
  CHECK(back.patience == 0);
  CHECK(training_config_from_json(Json::object()).epochs == TrainingConfig{}.epochs);
}
