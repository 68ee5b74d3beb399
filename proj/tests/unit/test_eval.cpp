// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "cannedbot/corpus/synthetic.hpp"
#include "cannedbot/corpus/text.hpp"
#include "cannedbot/curation/similarity.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/eval/ranking.hpp"

#include <filesystem>
#include <fstream>

using namespace cannedbot;
using namespace cannedbot::eval;
using curation::CannedList;
using objectives::Objective;

namespace {

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

struct Setup {
  corpus::SyntheticCorpus syn;
  std::vector<corpus::Dialogue> dialogues;
  corpus::Vocabulary vocab;
  std::vector<corpus::ContextTargetPair> pairs;
  CannedList canned;
};

Setup setup(int n_dialogues = 20) {
  Setup s;
  s.syn = corpus::generate_synthetic_corpus({.n_intents = 8, .n_dialogues = n_dialogues, .noise = 0.2});
  for (const auto& d : s.syn.dialogues) s.dialogues.push_back(corpus::regularize_turns(d));
  s.vocab = corpus::Vocabulary::build(s.dialogues);
  s.pairs = corpus::make_pairs(s.dialogues, s.vocab, {.utterance_len = 12, .max_context_utterances = 6});
  for (const auto& i : s.syn.intents) s.canned.append(i.template_text);
  return s;
}

ResponseModel model_for(Objective o, const Setup& s, int n_classes = 8) {
  encoder::ModelConfig c;
  c.vocab_size = static_cast<int>(s.vocab.size());
  c.word_dim = 6;
  c.utterance_hidden = 6;
  c.context_hidden = 6;
  c.projection_dim = 5;
  c.lstm_layers = 1;
  c.utterance_len = 12;
  c.max_context_utterances = 6;
  return ResponseModel::create(o, c, s.vocab, {.multiclass_hidden = {6}, .n_classes = n_classes});
}

const Objective kObjectives[] = {Objective::kContrastive, Objective::kBinary, Objective::kMulticlass};

}  // namespace

TEST_CASE("ranking follows each objective's confidence in descending order") {
  const auto s = setup();
  const std::vector<std::string> ctx{"hi there", "i need a new card"};
  for (Objective o : kObjectives) {
    CAPTURE(to_string(o));
    const auto model = model_for(o, s);
    const auto dump = embed_canned(model, s.canned);
    const Vector c = embed_context_texts(model, ctx);
    const auto ranked = rank_canned(model, c, s.canned, dump);
    REQUIRE(ranked.size() == s.canned.size());
    for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].confidence >= ranked[i].confidence);
    for (const auto& r : ranked) {
      const Vector t = model.target_embedding(s.canned.at(r.canned_id).text);
      double expected = 0.0;
      if (o == Objective::kContrastive) expected = curation::cosine_similarity(c, t);
      if (o == Objective::kBinary) expected = model.binary_score(c, t);
      if (o == Objective::kMulticlass) expected = model.class_probabilities(c)(r.canned_id);
      CHECK(r.confidence == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("a one-response list ranks that response first") {
  const auto s = setup();
  const auto model = model_for(Objective::kContrastive, s);
  const CannedList one = CannedList::from_texts({"Thanks for chatting with us have a great day"});
  const auto ranked = rank_canned(model, embed_context_texts(model, std::vector<std::string>{"bye"}), one,
                                  embed_canned(model, one));
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].canned_id == 0);
}

TEST_CASE("duplicated canned text ranks adjacently with equal confidence") {
  const auto s = setup();
  for (Objective o : {Objective::kContrastive, Objective::kBinary}) {
    const auto model = model_for(o, s);
    CannedList list = s.canned;
    list.append(s.canned.at(5).text);
    const auto dump = embed_canned(model, list);
    const auto ranked = rank_canned(model, embed_context_texts(model, context_texts(s.pairs[3])), list, dump);
    std::size_t a = 0, b = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      if (ranked[i].canned_id == 5) a = i;
      if (ranked[i].canned_id == 8) b = i;
    }
    CHECK(b == a + 1);
    CHECK(std::abs(ranked[a].confidence - ranked[b].confidence) <= 1e-6);
  }
}

TEST_CASE("stale or mismatched canned embeddings are rejected") {
  const auto s = setup();
  auto model = model_for(Objective::kContrastive, s);
  const auto dump = embed_canned(model, s.canned);
  const Vector c = embed_context_texts(model, std::vector<std::string>{"hello"});
  model.params()[0].value(0, 0) += 0.5;
  CHECK(error_code_of([&] { rank_canned(model, c, s.canned, dump); }) == ErrorCode::kChecksumMismatch);
  const auto fresh = embed_canned(model, s.canned);
  CannedList longer = s.canned;
  longer.append("a new response");
  CHECK(error_code_of([&] { rank_canned(model, c, longer, fresh); }) == ErrorCode::kChecksumMismatch);

  const auto mc = model_for(Objective::kMulticlass, s, 5);
  CHECK(error_code_of([&] { rank_canned(mc, Vector::Zero(5), s.canned, embed_canned(mc, s.canned)); }) ==
        ErrorCode::kClassCountMismatch);
}

TEST_CASE("canned embedding dumps round-trip and detect corruption") {
  const auto s = setup();
  const auto model = model_for(Objective::kContrastive, s);
  const auto dump = embed_canned(model, s.canned);
  const auto dir = std::filesystem::temp_directory_path() / "cannedbot_test_eval";
  std::filesystem::create_directories(dir);
  save_canned_embeddings(dir / "canned.emb", dump);
  const auto back = load_canned_embeddings(dir / "canned.emb");
  CHECK(back.checkpoint_id == dump.checkpoint_id);
  CHECK(back.embeddings == dump.embeddings);
  {
    std::fstream f(dir / "canned.emb", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-3, std::ios::end);
    f.put('\x7f');
  }
  CHECK_THROWS_AS(load_canned_embeddings(dir / "canned.emb"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("canned protocol labels pairs by normalized target and skips the rest") {
  const auto s = setup(30);
  const auto model = model_for(Objective::kContrastive, s);
  const auto dump = embed_canned(model, s.canned);
  const auto ev = evaluate(model, s.pairs, s.canned, dump, {});
  std::size_t matchable = 0;
  for (const auto& p : s.pairs) matchable += s.canned.find_normalized(corpus::normalize_text(p.target.text)).has_value();
  CHECK(ev.cases.size() == matchable);
  CHECK(ev.skipped == s.pairs.size() - matchable);
  CHECK(ev.confidences.size() == ev.cases.size());
  CHECK(ev.report.recall.at(1) == recall_at_k(ev.cases, 1));
  CHECK(ev.report.recall.count(10) == 0);  // only 8 candidates

  // Explicit labels override text matching.
  std::vector<int> labels(s.pairs.size(), 2);
  const auto labelled = evaluate(model, s.pairs, s.canned, dump, {}, labels);
  CHECK(labelled.cases.size() == s.pairs.size());
  for (const auto& c : labelled.cases) CHECK(c.true_index == 2);
}

TEST_CASE("batch protocol ranks the true target among distinct in-corpus responses") {
  const auto s = setup(60);
  for (Objective o : {Objective::kContrastive, Objective::kBinary}) {
    const auto model = model_for(o, s);
    const auto dump = embed_canned(model, s.canned);
    const auto ev = evaluate(model, s.pairs, s.canned, dump, {.protocol = Protocol::kBatch128, .batch_candidates = 16});
    CHECK(ev.cases.size() == s.pairs.size());
    for (const auto& c : ev.cases) {
      CHECK(c.scores.size() == 16);
      CHECK(c.true_index >= 0);
      CHECK(c.true_index < 16);
    }
  }
  const auto mc = model_for(Objective::kMulticlass, s);
  CHECK(error_code_of([&] {
          evaluate(mc, s.pairs, s.canned, embed_canned(mc, s.canned), {.protocol = Protocol::kBatch128});
        }) == ErrorCode::kInvalidArgument);
  CHECK(protocol_from_string("batch128") == Protocol::kBatch128);
  CHECK(error_code_of([] { protocol_from_string("full"); }) == ErrorCode::kInvalidArgument);
}
