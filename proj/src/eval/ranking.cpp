// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/eval/ranking.hpp"

#include "cannedbot/corpus/text.hpp"
#include "cannedbot/curation/similarity.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/numerics/checkpoint.hpp"
#include "cannedbot/numerics/rng.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace cannedbot::eval {

namespace {

constexpr const char* kDumpFormat = "cannedbot.canned_embeddings";

void check_dump(const ResponseModel& model, const curation::CannedList& canned, const CannedEmbeddings& dump) {
  if (dump.checkpoint_id != model.checkpoint_id()) {
    throw Error(ErrorCode::kChecksumMismatch, "canned embeddings were built by checkpoint " + dump.checkpoint_id +
                                                  ", model is " + model.checkpoint_id());
  }
  if (static_cast<std::size_t>(dump.embeddings.rows()) != canned.size()) {
    throw Error(ErrorCode::kChecksumMismatch, "canned embeddings cover " + std::to_string(dump.embeddings.rows()) +
                                                  " responses, list has " + std::to_string(canned.size()));
  }
}

void check_classes(const ResponseModel& model, const curation::CannedList& canned) {
  if (model.objective() == objectives::Objective::kMulticlass &&
      model.n_classes() != static_cast<int>(canned.size())) {
    throw Error(ErrorCode::kClassCountMismatch, "multiclass head has " + std::to_string(model.n_classes()) +
                                                    " classes, canned list has " + std::to_string(canned.size()));
  }
}

}  // namespace

CannedEmbeddings embed_canned(const ResponseModel& model, const curation::CannedList& canned) {
  CannedEmbeddings dump;
  dump.checkpoint_id = model.checkpoint_id();
  dump.embeddings.resize(static_cast<Eigen::Index>(canned.size()), model.config().projection_dim);
  for (const auto& r : canned.responses()) dump.embeddings.row(r.id) = model.target_embedding(r.text);
  return dump;
}

void save_canned_embeddings(const std::filesystem::path& path, const CannedEmbeddings& dump) {
  numerics::ParameterStore store;
  store.add("canned", dump.embeddings);
  numerics::save_checkpoint(path, store, {{"format", kDumpFormat}, {"checkpoint_id", dump.checkpoint_id}});
}

CannedEmbeddings load_canned_embeddings(const std::filesystem::path& path) {
  const auto ck = numerics::load_checkpoint(path);
  if (ck.manifest.value("format", std::string()) != kDumpFormat) {
    throw Error(ErrorCode::kParse, path.string() + " is not a canned embedding dump");
  }
  CannedEmbeddings dump;
  dump.checkpoint_id = ck.manifest.at("checkpoint_id").get<std::string>();
  dump.embeddings = ck.params[ck.params.find("canned")].value;
  return dump;
}

void check_canned_embeddings(const ResponseModel& model, const curation::CannedList& canned,
                             const CannedEmbeddings& dump) {
  check_dump(model, canned, dump);
  check_classes(model, canned);
}

std::vector<RankedResponse> rank_canned(const ResponseModel& model, const Vector& context_embedding,
                                        const curation::CannedList& canned, const CannedEmbeddings& dump) {
  check_canned_embeddings(model, canned, dump);
  return rank_checked(model, context_embedding, dump);
}

std::vector<RankedResponse> rank_checked(const ResponseModel& model, const Vector& context_embedding,
                                         const CannedEmbeddings& dump) {
  const auto n = dump.embeddings.rows();
  std::vector<RankedResponse> out(static_cast<std::size_t>(n));
  switch (model.objective()) {
    case objectives::Objective::kContrastive:
      for (Eigen::Index i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = {static_cast<int>(i),
                                            curation::cosine_similarity(context_embedding, dump.embeddings.row(i))};
      }
      break;
    case objectives::Objective::kBinary: {
      const Tensor scores = model.binary_head().score_matrix(model.params(), Tensor(context_embedding), dump.embeddings);
      for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = {static_cast<int>(i), scores(0, i)};
      break;
    }
    case objectives::Objective::kMulticlass: {
      const Vector p = model.class_probabilities(context_embedding);
      for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = {static_cast<int>(i), p(i)};
      break;
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedResponse& a, const RankedResponse& b) { return a.confidence > b.confidence; });
  return out;
}

std::vector<std::string> context_texts(const corpus::ContextTargetPair& pair) {
  std::vector<std::string> out;
  out.reserve(pair.context.size());
  for (const auto& u : pair.context) out.push_back(u.text);
  return out;
}

Vector embed_context_texts(const ResponseModel& model, std::span<const std::string> texts) {
  std::map<std::string, Vector> memo;
  std::vector<Vector> us;
  us.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = memo.find(t);
    if (it == memo.end()) it = memo.emplace(t, model.utterance_embedding(t)).first;
    us.push_back(it->second);
  }
  return model.context_embedding(us);
}

std::string_view to_string(Protocol p) { return p == Protocol::kCanned ? "canned" : "batch128"; }

Protocol protocol_from_string(std::string_view s) {
  if (s == "canned") return Protocol::kCanned;
  if (s == "batch128") return Protocol::kBatch128;
  throw Error(ErrorCode::kInvalidArgument, "unknown protocol: " + std::string(s));
}

Evaluation evaluate(const ResponseModel& model, const std::vector<corpus::ContextTargetPair>& pairs,
                    const curation::CannedList& canned, const CannedEmbeddings& dump,
                    const EvaluationOptions& options, std::span<const int> labels) {
  if (!labels.empty() && labels.size() != pairs.size()) {
    throw Error(ErrorCode::kInvalidArgument, "labels must be empty or one per pair");
  }
  Evaluation ev;
  if (options.protocol == Protocol::kCanned) {
    check_canned_embeddings(model, canned, dump);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      std::optional<int> truth;
      if (!labels.empty()) {
        truth = labels[i];
      } else {
        truth = canned.find_normalized(corpus::normalize_text(pairs[i].target.text));
      }
      if (!truth || *truth < 0 || static_cast<std::size_t>(*truth) >= canned.size()) {
        ++ev.skipped;
        continue;
      }
      const auto texts = context_texts(pairs[i]);
      const auto ranked = rank_checked(model, embed_context_texts(model, texts), dump);
      RankingCase rc;
      rc.scores.assign(canned.size(), 0.0);
      for (const auto& r : ranked) rc.scores[static_cast<std::size_t>(r.canned_id)] = r.confidence;
      rc.true_index = *truth;
      ev.cases.push_back(std::move(rc));
      ev.confidences.push_back({ranked.front().confidence, ranked.front().canned_id == *truth});
    }
  } else {
    if (model.objective() == objectives::Objective::kMulticlass) {
      throw Error(ErrorCode::kInvalidArgument, "batch128 protocol needs a contrastive or binary model");
    }
    if (options.batch_candidates < 2) throw Error(ErrorCode::kInvalidArgument, "batch_candidates must be >= 2");
    // Pool of distinct in-corpus responses.
    std::map<std::string, std::size_t> pool_index;
    std::vector<std::string> pool;
    for (const auto& p : pairs) {
      const std::string norm = corpus::normalize_text(p.target.text);
      if (!norm.empty() && pool_index.emplace(norm, pool.size()).second) pool.push_back(norm);
    }
    if (pool.size() < 2) throw Error(ErrorCode::kEmptyInput, "batch128 needs at least 2 distinct responses");
    Tensor pool_embeddings(static_cast<Eigen::Index>(pool.size()), model.config().projection_dim);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      pool_embeddings.row(static_cast<Eigen::Index>(i)) = model.target_embedding(pool[i]);
    }
    numerics::Rng rng(options.seed);
    const std::size_t n = std::min(options.batch_candidates, pool.size());
    for (const auto& p : pairs) {
      const std::string norm = corpus::normalize_text(p.target.text);
      const auto it = pool_index.find(norm);
      if (it == pool_index.end()) {
        ++ev.skipped;
        continue;
      }
      // n - 1 distinct negatives by partial Fisher-Yates over the other pool entries.
      std::vector<std::size_t> others;
      others.reserve(pool.size() - 1);
      for (std::size_t j = 0; j < pool.size(); ++j) {
        if (j != it->second) others.push_back(j);
      }
      for (std::size_t j = 0; j + 1 < n; ++j) std::swap(others[j], others[j + rng.index(others.size() - j)]);
      std::vector<std::size_t> candidates(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(n - 1));
      const std::size_t true_pos = rng.index(n);
      candidates.insert(candidates.begin() + static_cast<std::ptrdiff_t>(true_pos), it->second);

      const Vector c = embed_context_texts(model, context_texts(p));
      Tensor cand(static_cast<Eigen::Index>(n), pool_embeddings.cols());
      for (std::size_t j = 0; j < n; ++j) cand.row(static_cast<Eigen::Index>(j)) = pool_embeddings.row(static_cast<Eigen::Index>(candidates[j]));
      RankingCase rc;
      if (model.objective() == objectives::Objective::kBinary) {
        const Tensor s = model.binary_head().score_matrix(model.params(), Tensor(c), cand);
        rc.scores.assign(s.data(), s.data() + s.size());
      } else {
        for (Eigen::Index j = 0; j < cand.rows(); ++j) rc.scores.push_back(curation::cosine_similarity(c, cand.row(j)));
      }
      rc.true_index = static_cast<int>(true_pos);
      const auto top = std::max_element(rc.scores.begin(), rc.scores.end());
      ev.confidences.push_back({*top, top - rc.scores.begin() == rc.true_index});
      ev.cases.push_back(std::move(rc));
    }
  }
  if (ev.cases.empty()) throw Error(ErrorCode::kEmptyInput, "no evaluable pairs");
  ev.report = summarize(ev.cases, options.ks);
  return ev;
}

Json to_json(const Evaluation& e) {
  Json j = to_json(e.report);
  j["skipped"] = e.skipped;
  return j;
}

objectives::LabelledPairs label_by_canned(const std::vector<corpus::ContextTargetPair>& pairs,
                                          const curation::CannedList& canned) {
  objectives::LabelledPairs out;
  for (const auto& p : pairs) {
    if (const auto id = canned.find_normalized(corpus::normalize_text(p.target.text))) {
      out.pairs.push_back(p);
      out.class_ids.push_back(*id);
    }
  }
  return out;
}

}  // namespace cannedbot::eval
