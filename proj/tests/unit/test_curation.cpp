// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "../support/bow_embedder.hpp"
#include "cannedbot/corpus/synthetic.hpp"
#include "cannedbot/corpus/text.hpp"
#include "cannedbot/curation/extract.hpp"
#include "cannedbot/curation/kmeans.hpp"
#include "cannedbot/curation/weak_label.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/numerics/rng.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

using namespace cannedbot;
using namespace cannedbot::curation;
using cannedbot::testing::BagOfWordsEmbedder;
using numerics::Rng;

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

struct Blobs {
  Tensor points;
  std::vector<int> labels;
};

Blobs make_blobs(int per_blob, Rng& rng) {
  const double centers[3][2] = {{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}};
  Blobs b;
  b.points.resize(3 * per_blob, 2);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < per_blob; ++i) {
      const int row = c * per_blob + i;
      b.points(row, 0) = centers[c][0] + rng.normal();
      b.points(row, 1) = centers[c][1] + rng.normal();
      b.labels.push_back(c);
    }
  }
  return b;
}

double purity(const std::vector<int>& assignments, const std::vector<int>& labels, int k) {
  std::map<std::pair<int, int>, int> counts;
  for (std::size_t i = 0; i < labels.size(); ++i) ++counts[{assignments[i], labels[i]}];
  int total = 0;
  for (int c = 0; c < k; ++c) {
    int best = 0;
    for (const auto& [key, n] : counts) {
      if (key.first == c) best = std::max(best, n);
    }
    total += best;
  }
  return static_cast<double>(total) / static_cast<double>(labels.size());
}

struct SyntheticSetup {
  corpus::SyntheticCorpus syn;
  std::vector<corpus::Dialogue> dialogues;
  corpus::Vocabulary vocab;
  std::vector<corpus::ContextTargetPair> pairs;
  CannedList templates;
  std::map<std::string, int> intent_of_template;
};

SyntheticSetup synthetic_setup(double noise, int n_dialogues = 120, int n_intents = 20) {
  SyntheticSetup s;
  s.syn = corpus::generate_synthetic_corpus({.n_intents = n_intents, .n_dialogues = n_dialogues, .noise = noise});
  for (const auto& d : s.syn.dialogues) s.dialogues.push_back(corpus::regularize_turns(d));
  s.vocab = corpus::Vocabulary::build(s.dialogues);
  s.pairs = corpus::make_pairs(s.dialogues, s.vocab);
  for (const auto& intent : s.syn.intents) {
    const int id = s.templates.append(intent.template_text);
    s.intent_of_template[s.templates.at(id).normalized] = intent.id;
  }
  return s;
}

RocResult roc_of(const std::vector<std::pair<double, bool>>& v) { return roc_auc(v); }

// Digits are masked by normalization, so test labels spell numbers in letters.
std::string letters(int i) {
  std::string out;
  do {
    out.push_back(static_cast<char>('a' + i % 26));
    i /= 26;
  } while (i > 0);
  return out;
}

double brute_force_auc(const std::vector<std::pair<double, bool>>& v) {
  double wins = 0.0, total = 0.0;
  for (const auto& p : v) {
    if (!p.second) continue;
    for (const auto& n : v) {
      if (n.second) continue;
      wins += p.first > n.first ? 1.0 : (p.first == n.first ? 0.5 : 0.0);
      total += 1.0;
    }
  }
  return wins / total;
}

}  // namespace

TEST_CASE("k-means with k equal to the point count puts every point in its own cluster") {
  Rng rng(1);
  Tensor points(12, 3);
  for (Eigen::Index i = 0; i < points.size(); ++i) points.data()[i] = rng.uniform(-5.0, 5.0);
  const auto r = kmeans(points, 12, 3);
  CHECK(r.inertia == 0.0);
  CHECK(std::set<int>(r.assignments.begin(), r.assignments.end()).size() == 12);
  CHECK(r.converged);
}

TEST_CASE("k-means recovers well-separated blobs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Blobs b = make_blobs(60, rng);
    const auto r = kmeans(b.points, 3, seed);
    CHECK(purity(r.assignments, b.labels, 3) >= 0.95);
  }
}

TEST_CASE("k-means inertia never increases and every point sits at its nearest centroid") {
  Rng rng(7);
  for (int run = 0; run < 50; ++run) {
    const int n = 5 + static_cast<int>(rng.index(60));
    const int d = 1 + static_cast<int>(rng.index(5));
    const int k = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(std::min(n, 10))));
    Tensor points(n, d);
    for (Eigen::Index i = 0; i < points.size(); ++i) points.data()[i] = rng.normal();
    const auto r = kmeans(points, k, static_cast<std::uint64_t>(run), 200);
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
      REQUIRE(r.inertia_history[i] <= r.inertia_history[i - 1]);
    }
    REQUIRE(r.converged);
    REQUIRE(r.inertia == doctest::Approx(kmeans_inertia(points, r.centroids, r.assignments)));
    std::set<int> used(r.assignments.begin(), r.assignments.end());
    REQUIRE(used.size() == static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < n; ++i) {
      const Real own = (points.row(i) - r.centroids.row(r.assignments[static_cast<std::size_t>(i)])).squaredNorm();
      for (int c = 0; c < k; ++c) REQUIRE(own <= (points.row(i) - r.centroids.row(c)).squaredNorm() + 1e-12);
    }
  }
}

TEST_CASE("k-means is deterministic and validates k") {
  Rng rng(2);
  const Blobs b = make_blobs(20, rng);
  const auto a = kmeans(b.points, 4, 9);
  const auto c = kmeans(b.points, 4, 9);
  CHECK(a.assignments == c.assignments);
  CHECK(a.centroids == c.centroids);
  CHECK(error_code_of([&] { kmeans(b.points, 61, 1); }) == ErrorCode::kTooFewPoints);
  CHECK(error_code_of([&] { kmeans(b.points, 0, 1); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("k-means handles duplicated points without empty clusters") {
  Tensor points(6, 1);
  points << 0, 0, 0, 0, 5, 5;
  const auto r = kmeans(points, 3, 4);
  CHECK(std::set<int>(r.assignments.begin(), r.assignments.end()).size() == 3);
}

TEST_CASE("ROC AUC matches the pairwise brute force with ties") {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::pair<double, bool>> v;
    const int n = 2 + static_cast<int>(rng.index(80));
    for (int i = 0; i < n; ++i) {
      const double s = trial % 2 ? static_cast<double>(rng.index(5)) : rng.uniform();
      v.push_back({s, rng.bernoulli(0.4)});
    }
    v[0].second = true;
    v[1].second = false;
    const auto r = roc_of(v);
    REQUIRE(std::abs(r.auc - brute_force_auc(v)) <= 1e-9);
    REQUIRE(r.curve.front().tpr == 0.0);
    REQUIRE(r.curve.back().tpr == 1.0);
    REQUIRE(r.curve.back().fpr == 1.0);
    for (std::size_t i = 1; i < r.curve.size(); ++i) {
      REQUIRE(r.curve[i].tpr >= r.curve[i - 1].tpr);
      REQUIRE(r.curve[i].fpr >= r.curve[i - 1].fpr);
    }
  }
}

TEST_CASE("ROC AUC is one when separated and one half when scores are uninformative") {
  std::vector<std::pair<double, bool>> separated;
  for (int i = 0; i < 50; ++i) separated.push_back({i / 100.0, false});
  for (int i = 0; i < 50; ++i) separated.push_back({1.0 + i / 100.0, true});
  CHECK(roc_of(separated).auc == 1.0);
  CHECK(youden_threshold(roc_of(separated)) == doctest::Approx(1.0));

  Rng rng(4);
  std::vector<std::pair<double, bool>> shuffled;
  for (int i = 0; i < 1000; ++i) shuffled.push_back({rng.uniform(), rng.bernoulli(0.5)});
  CHECK(std::abs(roc_of(shuffled).auc - 0.5) <= 0.05);

  const std::vector<std::pair<double, bool>> single{{0.1, true}, {0.3, true}};
  CHECK(error_code_of([&] { roc_of(single); }) == ErrorCode::kSingleClass);
}

TEST_CASE("classify_similar on identical text and unreachable thresholds") {
  const auto s = synthetic_setup(0.0, 20);
  const BagOfWordsEmbedder bow(s.vocab);
  const auto same = classify_similar("Let me check the status of your card", "let me check the status of your card", bow);
  CHECK(same.score == 1.0);
  CHECK(same.label == SimilarityLabel::kSimilar);
  CHECK(classify_similar("x", "x", bow, 1.0).label == SimilarityLabel::kSimilar);
  CHECK(classify_similar("hello there", "hello there", bow, 1.1).label == SimilarityLabel::kUnique);
  const auto diff = classify_similar("I can reset your card for you right now", "Thanks for chatting with us", bow);
  CHECK(diff.score < 0.5);
}

TEST_CASE("thirds split a nine-turn dialogue into three turns each") {
  for (std::size_t i = 0; i < 9; ++i) CHECK(dialogue_third(i, 9) == static_cast<int>(i / 3));
  CHECK(error_code_of([] { dialogue_third(3, 3); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("unique pairs never join utterances from the same third") {
  std::vector<corpus::Dialogue> dialogues;
  for (int d = 0; d < 30; ++d) {
    corpus::Dialogue dia;
    dia.id = std::to_string(d);
    for (int t = 0; t < 9; ++t) {
      const auto speaker = t % 2 == 0 ? corpus::Speaker::kAgent : corpus::Speaker::kCustomer;
      dia.utterances.push_back({speaker, "d" + letters(d) + " turn " + letters(t), {}, std::nullopt});
    }
    dialogues.push_back(std::move(dia));
  }
  const auto vocab = corpus::Vocabulary::build(dialogues);
  const BagOfWordsEmbedder bow(vocab);
  const auto pairs = generate_similarity_dataset(dialogues, bow, {.n_similar = 0, .n_unique = 50, .seed = 2});
  CHECK(pairs.size() == 50);
  for (const auto& p : pairs) {
    CHECK(p.label == SimilarityLabel::kUnique);
    const auto turn = [](const std::string& t) { return static_cast<std::size_t>(t.back() - 'a'); };
    CHECK(p.a.substr(0, p.a.find(' ')) == p.b.substr(0, p.b.find(' ')));
    CHECK(dialogue_third(turn(p.a), 9) != dialogue_third(turn(p.b), 9));
    CHECK(p.score >= -1.0);
    CHECK(p.score <= 1.0);
  }
}

TEST_CASE("similar candidates on zero-noise data share an intent") {
  const auto s = synthetic_setup(0.0, 150);
  const BagOfWordsEmbedder bow(s.vocab);
  const auto pairs = generate_similarity_dataset(s.dialogues, bow, {.n_similar = 100, .n_unique = 200, .seed = 5});
  std::size_t similar = 0, unique = 0;
  for (const auto& p : pairs) {
    if (p.label == SimilarityLabel::kSimilar) {
      ++similar;
      const auto a = s.intent_of_template.find(corpus::normalize_text(p.a));
      const auto b = s.intent_of_template.find(corpus::normalize_text(p.b));
      REQUIRE(a != s.intent_of_template.end());
      REQUIRE(b != s.intent_of_template.end());
      CHECK(a->second == b->second);
    } else {
      ++unique;
    }
  }
  CHECK(similar == 100);
  CHECK(unique == 200);
  // Intent identity as the label: the ROC harness separates the two classes.
  std::vector<std::pair<double, bool>> scored;
  for (const auto& p : pairs) scored.push_back({p.score, p.label == SimilarityLabel::kSimilar});
  CHECK(roc_auc(scored).auc >= 0.9);
}

TEST_CASE("canned-list extraction recovers the zero-noise templates") {
  const auto s = synthetic_setup(0.0, 300);
  const BagOfWordsEmbedder bow(s.vocab);
  const auto list = extract_canned_list(s.dialogues, bow, {.top_n = 10000, .k = 20, .seed = 3});
  std::set<std::string> got, want;
  for (const auto& r : list.responses()) got.insert(r.normalized);
  for (const auto& r : s.templates.responses()) want.insert(r.normalized);
  CHECK(got == want);
  for (std::size_t i = 0; i < list.size(); ++i) {
    CHECK(list.responses()[i].id == static_cast<int>(i));
    CHECK(list.responses()[i].frequency > 0);
  }
  // Deterministic for a fixed seed and embedder.
  CHECK(extract_canned_list(s.dialogues, bow, {.k = 20, .seed = 3}) == list);
}

TEST_CASE("extraction with k = 1 keeps the member nearest the global centroid") {
  const auto s = synthetic_setup(0.0, 60);
  const BagOfWordsEmbedder bow(s.vocab);
  const auto list = extract_canned_list(s.dialogues, bow, {.k = 1});
  REQUIRE(list.size() == 1);
  const auto counts = count_agent_utterances(s.dialogues);
  std::vector<std::string> texts;
  for (const auto& c : counts) texts.push_back(c.normalized);
  const Tensor pts = bow.embed_all(texts);
  const Vector centroid = pts.colwise().mean();
  std::size_t best = 0;
  for (std::size_t i = 1; i < texts.size(); ++i) {
    if ((pts.row(static_cast<Eigen::Index>(i)) - centroid).squaredNorm() <
        (pts.row(static_cast<Eigen::Index>(best)) - centroid).squaredNorm()) {
      best = i;
    }
  }
  CHECK(list.at(0).normalized == texts[best]);
  CHECK(error_code_of([&] { extract_canned_list(s.dialogues, bow, {.k = 21}); }) ==
        ErrorCode::kTooFewUniqueUtterances);
}

TEST_CASE("dedup drops representatives similar to an earlier response") {
  const auto s = synthetic_setup(0.0, 300);
  const BagOfWordsEmbedder bow(s.vocab);
  // Sibling templates differ in one word of eight or nine: cosine about 0.88.
  const auto strict = extract_canned_list(s.dialogues, bow, {.k = 20, .seed = 3, .dedup_threshold = 0.8});
  CHECK(strict.size() < 20);
  for (std::size_t i = 0; i < strict.size(); ++i) {
    for (std::size_t j = i + 1; j < strict.size(); ++j) {
      CHECK(classify_similar(strict.at(static_cast<int>(i)).text, strict.at(static_cast<int>(j)).text, bow, 0.8).label ==
            SimilarityLabel::kUnique);
    }
  }
}

TEST_CASE("exact matching masks digits and labels every zero-noise agent turn correctly") {
  CannedList canned = CannedList::from_texts({"your pin is 00000"});
  corpus::ContextTargetPair p;
  p.context.push_back({corpus::Speaker::kCustomer, "what is my pin", {}, std::nullopt});
  p.target = {corpus::Speaker::kAgent, "Your PIN is 94567", {}, std::nullopt};
  auto q = p;
  q.target.text = "Your card is 94567";
  const auto labels = exact_match_positives({p, q}, canned);
  REQUIRE(labels.size() == 1);
  CHECK(labels[0].canned_id == 0);
  CHECK(labels[0].source == LabelSource::kExactMatch);

  const auto s = synthetic_setup(0.0, 100);
  const auto exact = exact_match_positives(s.pairs, s.templates);
  CHECK(exact.size() == s.pairs.size());
  for (const auto& w : exact) {
    validate(w);
    CHECK(s.intent_of_template.at(s.templates.at(w.canned_id).normalized) == *w.pair.target.intent);
  }
}

TEST_CASE("fuzzy matching: identity scores one, unreachable thresholds match nothing") {
  const auto s = synthetic_setup(0.1, 100);
  const BagOfWordsEmbedder bow(s.vocab);
  CHECK(fuzzy_match_positives(s.pairs, s.templates, bow, {.threshold = 1.01, .include_exact = true}).empty());

  const auto exact = exact_match_positives(s.pairs, s.templates);
  const auto with_exact = fuzzy_match_positives(s.pairs, s.templates, bow, {.threshold = 0.9, .include_exact = true});
  std::set<std::pair<std::string, int>> fuzzy_keys;
  for (const auto& w : with_exact) {
    fuzzy_keys.insert({context_key(w.pair) + w.pair.target.text, w.canned_id});
    if (s.templates.find_normalized(corpus::normalize_text(w.pair.target.text))) CHECK(w.score == 1.0);
  }
  for (const auto& w : exact) CHECK(fuzzy_keys.count({context_key(w.pair) + w.pair.target.text, w.canned_id}) == 1);

  // Fuzzy recall of the true intent is at least exact-match recall on noisy data.
  const auto fuzzy_only = fuzzy_match_positives(s.pairs, s.templates, bow, {.threshold = 0.6});
  std::size_t exact_correct = 0, fuzzy_correct = 0;
  for (const auto& w : exact) {
    exact_correct += s.intent_of_template.at(s.templates.at(w.canned_id).normalized) == *w.pair.target.intent;
  }
  for (const auto& w : fuzzy_only) {
    CHECK(!s.templates.find_normalized(corpus::normalize_text(w.pair.target.text)));
    fuzzy_correct += s.intent_of_template.at(s.templates.at(w.canned_id).normalized) == *w.pair.target.intent;
  }
  CHECK(fuzzy_correct > 0);
  CHECK(exact_correct + fuzzy_correct >= exact_correct);
}

TEST_CASE("negative strategies respect their construction rules") {
  const auto s = synthetic_setup(0.1, 100);
  const BagOfWordsEmbedder bow(s.vocab);
  // Half the templates form the canned list, so some targets match nothing.
  CannedList canned;
  for (int i = 0; i < 10; ++i) canned.append(s.templates.at(i).text);
  const auto positives = exact_match_positives(s.pairs, canned);
  REQUIRE(!positives.empty());

  std::vector<UsageLogEntry> usage;
  for (int i = 0; i < 40; ++i) {
    UsageLogEntry e;
    e.request_id = "r" + std::to_string(i);
    e.conversation_id = std::to_string(i);
    e.shown = {{i % 10, 0.9}, {(i + 1) % 10, 0.8}};
    e.context = {{corpus::Speaker::kCustomer, "usage context " + letters(i), {}, std::nullopt}};
    e.reported = true;
    if (i % 2 == 0) e.used_canned_id = i % 10;
    usage.push_back(std::move(e));
  }
  NegativeOptions options;
  options.usage_sample_rate = 1.0;
  const auto negatives = build_negative_dataset(positives, s.pairs, canned, bow, usage, options);

  std::map<NegativeStrategy, std::size_t> counts;
  std::set<std::pair<std::string, int>> positive_keys;
  for (const auto& w : positives) positive_keys.insert({context_key(w.pair), w.canned_id});
  const Tensor canned_emb = bow.embed_all(canned.texts());
  for (const auto& w : negatives) {
    validate(w);
    REQUIRE(w.polarity == Polarity::kNegative);
    ++counts[*w.strategy];
    CHECK(positive_keys.count({context_key(w.pair), w.canned_id}) == 0);
    switch (*w.strategy) {
      case NegativeStrategy::kWrongTarget: {
        CHECK(cosine_similarity(bow.embed(w.pair.target.text), canned_emb.row(w.canned_id)) < options.threshold);
        CHECK(canned.find_normalized(corpus::normalize_text(w.pair.target.text)) != w.canned_id);
        break;
      }
      case NegativeStrategy::kNoMatchContext: {
        const Vector t = bow.embed(w.pair.target.text);
        for (int id = 0; id < 10; ++id) CHECK(cosine_similarity(t, canned_emb.row(id)) < options.threshold);
        break;
      }
      case NegativeStrategy::kRejectedSuggestion: {
        const int i = std::stoi(w.pair.dialogue_id);
        CHECK(i % 2 == 1);
        CHECK((w.canned_id == i % 10 || w.canned_id == (i + 1) % 10));
        break;
      }
    }
  }
  CHECK(counts[NegativeStrategy::kWrongTarget] == negative_quota(options.wrong_target_ratio, positives.size()));
  CHECK(counts[NegativeStrategy::kNoMatchContext] == negative_quota(options.no_match_ratio, positives.size()));
  CHECK(counts[NegativeStrategy::kRejectedSuggestion] == 40);

  // Deterministic in the seed.
  const auto again = build_negative_dataset(positives, s.pairs, canned, bow, usage, options);
  REQUIRE(again.size() == negatives.size());
  for (std::size_t i = 0; i < again.size(); ++i) CHECK(again[i].canned_id == negatives[i].canned_id);

  options.usage_sample_rate = 0.25;
  std::vector<UsageLogEntry> many;
  for (int i = 0; i < 2000; ++i) {
    UsageLogEntry e = usage[1];
    e.request_id = "m" + std::to_string(i);
    e.context[0].text = "many " + letters(i);
    many.push_back(e);
  }
  std::size_t rejected = 0;
  for (const auto& w : build_negative_dataset({}, {}, canned, bow, many, options)) {
    rejected += w.strategy == NegativeStrategy::kRejectedSuggestion;
  }
  CHECK(std::abs(static_cast<double>(rejected) / 4000.0 - 0.25) < 0.04);
}

TEST_CASE("conflicting polarities are resolved in favour of positives") {
  corpus::ContextTargetPair p;
  p.context.push_back({corpus::Speaker::kCustomer, "hi", {}, std::nullopt});
  std::vector<WeakLabel> labels = {
      {p, 1, Polarity::kPositive, LabelSource::kExactMatch, std::nullopt, 1.0},
      {p, 1, Polarity::kNegative, std::nullopt, NegativeStrategy::kWrongTarget, 0.1},
      {p, 2, Polarity::kNegative, std::nullopt, NegativeStrategy::kWrongTarget, 0.1},
  };
  const auto resolved = resolve_conflicts(labels);
  CHECK(resolved.size() == 2);
  CHECK(resolved[1].canned_id == 2);
}

TEST_CASE("usage positives count every used suggestion") {
  const CannedList canned = CannedList::from_texts({"a b c", "d e f", "g h i"});
  std::vector<UsageLogEntry> usage;
  for (int i = 0; i < 14; ++i) {
    UsageLogEntry e;
    e.request_id = std::to_string(i);
    e.shown = {{0, 0.7}, {2, 0.6}};
    e.reported = i < 12;
    if (i < 10) e.used_canned_id = 2;
    usage.push_back(e);
  }
  const auto pos = usage_positives(usage, canned);
  CHECK(pos.size() == 10);
  for (const auto& w : pos) {
    CHECK(w.source == LabelSource::kUsageLog);
    CHECK(w.canned_id == 2);
    CHECK(w.score == 0.6);
  }
  UsageLogEntry bad = usage[0];
  bad.used_canned_id = 1;
  CHECK(error_code_of([&] { validate(bad); }) == ErrorCode::kValidation);
}

TEST_CASE("canned lists, weak labels and usage entries round-trip through files") {
  const auto dir = std::filesystem::temp_directory_path() / "cannedbot_test_curation";
  std::filesystem::create_directories(dir);
  CannedList list;
  list.append("Your PIN is 1234", 5, 2);
  list.append("Goodbye", 1, 0);
  write_canned_list(dir / "canned.jsonl", list);
  CHECK(read_canned_list(dir / "canned.jsonl") == list);
  CHECK(list.at(0).normalized == "your pin is 0000");

  const auto s = synthetic_setup(0.0, 5);
  auto labels = exact_match_positives(s.pairs, s.templates);
  labels.push_back({s.pairs[0], 3, Polarity::kNegative, std::nullopt, NegativeStrategy::kNoMatchContext, 0.2});
  write_weak_labels(dir / "labels.jsonl", labels);
  const auto back = read_weak_labels(dir / "labels.jsonl");
  REQUIRE(back.size() == labels.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].pair == labels[i].pair);
    CHECK(back[i].canned_id == labels[i].canned_id);
    CHECK(back[i].source == labels[i].source);
    CHECK(back[i].strategy == labels[i].strategy);
  }

  UsageLogEntry e;
  e.request_id = "req-1";
  e.conversation_id = "conv";
  e.timestamp_ms = 42;
  e.shown = {{1, 0.5}};
  e.used_canned_id = 1;
  e.reported = true;
  e.context = {{corpus::Speaker::kCustomer, "hi", {}, std::nullopt}};
  write_usage_entries(dir / "usage.jsonl", {e});
  CHECK(read_usage_entries(dir / "usage.jsonl") == std::vector<UsageLogEntry>{e});

  CHECK(error_code_of([] { CannedList(std::vector<CannedResponse>{{1, "x", "", 0, -1}}); }) == ErrorCode::kValidation);
  WeakLabel broken{s.pairs[0], 0, Polarity::kNegative, LabelSource::kExactMatch, std::nullopt, 1.0};
  CHECK(error_code_of([&] { validate(broken); }) == ErrorCode::kValidation);
  std::filesystem::remove_all(dir);
}
