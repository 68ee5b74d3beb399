// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/curation/similarity.hpp"

#include "cannedbot/corpus/text.hpp"
#include "cannedbot/error.hpp"
#include "cannedbot/numerics/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace cannedbot::curation {

std::string_view to_string(SimilarityLabel label) {
  return label == SimilarityLabel::kSimilar ? "similar" : "unique";
}

SimilarityLabel similarity_label_from_string(std::string_view s) {
  if (s == "similar") return SimilarityLabel::kSimilar;
  if (s == "unique") return SimilarityLabel::kUnique;
  throw Error(ErrorCode::kInvalidArgument, "unknown similarity label: " + std::string(s));
}

double cosine_similarity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kShapeMismatch, "cosine of vectors of different size");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

SimilarityResult classify_similar(std::string_view a, std::string_view b,
                                  const encoder::UtteranceEmbedder& embedder, double threshold) {
  SimilarityResult r;
  r.score = corpus::normalize_text(a) == corpus::normalize_text(b)
                ? 1.0
                : cosine_similarity(embedder.embed(a), embedder.embed(b));
  r.label = r.score >= threshold ? SimilarityLabel::kSimilar : SimilarityLabel::kUnique;
  return r;
}

int dialogue_third(std::size_t index, std::size_t n) {
  if (n == 0 || index >= n) throw Error(ErrorCode::kInvalidArgument, "turn index outside dialogue");
  return static_cast<int>(3 * index / n);
}

namespace {

struct AgentTurn {
  std::size_t dialogue;
  std::string text;
  std::string normalized;
};

class EmbeddingMemo {
 public:
  explicit EmbeddingMemo(const encoder::UtteranceEmbedder& e) : embedder_(e) {}
  const Vector& get(const std::string& normalized) {
    auto it = memo_.find(normalized);
    if (it == memo_.end()) it = memo_.emplace(normalized, embedder_.embed(normalized)).first;
    return it->second;
  }
  double score(const std::string& a, const std::string& b) {
    return a == b ? 1.0 : cosine_similarity(get(a), get(b));
  }

 private:
  const encoder::UtteranceEmbedder& embedder_;
  std::map<std::string, Vector> memo_;
};

}  // namespace

std::vector<SimilarityPair> generate_similarity_dataset(const std::vector<corpus::Dialogue>& dialogues,
                                                        const encoder::UtteranceEmbedder& embedder,
                                                        const SimilarityDatasetOptions& options) {
  if (!(options.similar_top_fraction > 0.0 && options.similar_top_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "similar_top_fraction must be in (0, 1]");
  }
  numerics::Rng rng(options.seed);
  EmbeddingMemo memo(embedder);
  std::vector<SimilarityPair> out;

  // Unique: one agent utterance from each third of a dialogue, paired across thirds.
  std::vector<std::vector<SimilarityPair>> per_dialogue;
  std::vector<AgentTurn> agent_turns;
  for (std::size_t d = 0; d < dialogues.size(); ++d) {
    const auto& us = dialogues[d].utterances;
    std::array<std::vector<std::size_t>, 3> thirds;
    for (std::size_t i = 0; i < us.size(); ++i) {
      if (us[i].speaker != corpus::Speaker::kAgent) continue;
      thirds[static_cast<std::size_t>(dialogue_third(i, us.size()))].push_back(i);
      agent_turns.push_back({d, us[i].text, corpus::normalize_text(us[i].text)});
    }
    std::vector<std::size_t> picks;
    for (const auto& t : thirds) {
      if (!t.empty()) picks.push_back(t[rng.index(t.size())]);
    }
    std::vector<SimilarityPair> pairs;
    for (std::size_t x = 0; x < picks.size(); ++x) {
      for (std::size_t y = x + 1; y < picks.size(); ++y) {
        const std::string na = corpus::normalize_text(us[picks[x]].text);
        const std::string nb = corpus::normalize_text(us[picks[y]].text);
        if (na == nb) continue;
        pairs.push_back({us[picks[x]].text, us[picks[y]].text, SimilarityLabel::kUnique, memo.score(na, nb)});
      }
    }
    if (!pairs.empty()) per_dialogue.push_back(std::move(pairs));
  }
  rng.shuffle(per_dialogue);
  // Round-robin so the unique set spans as many dialogues as possible.
  for (std::size_t round = 0; out.size() < options.n_unique; ++round) {
    bool any = false;
    for (const auto& pairs : per_dialogue) {
      if (round < pairs.size() && out.size() < options.n_unique) {
        out.push_back(pairs[round]);
        any = true;
      }
    }
    if (!any) break;
  }

  // Similar: top-scoring random cross-dialogue agent pairs.
  if (options.n_similar > 0 && agent_turns.size() >= 2) {
    const auto pool = static_cast<std::size_t>(
        std::ceil(static_cast<double>(options.n_similar) / options.similar_top_fraction));
    std::vector<SimilarityPair> candidates;
    std::set<std::pair<std::size_t, std::size_t>> drawn;
    const std::size_t max_attempts = pool * 20;
    for (std::size_t attempt = 0; attempt < max_attempts && candidates.size() < pool; ++attempt) {
      std::size_t i = rng.index(agent_turns.size());
      std::size_t j = rng.index(agent_turns.size());
      if (agent_turns[i].dialogue == agent_turns[j].dialogue) continue;
      if (i > j) std::swap(i, j);
      if (!drawn.insert({i, j}).second) continue;
      candidates.push_back({agent_turns[i].text, agent_turns[j].text, SimilarityLabel::kSimilar,
                            memo.score(agent_turns[i].normalized, agent_turns[j].normalized)});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const SimilarityPair& a, const SimilarityPair& b) { return a.score > b.score; });
    const std::size_t keep = std::min(
        options.n_similar,
        static_cast<std::size_t>(std::ceil(static_cast<double>(candidates.size()) * options.similar_top_fraction)));
    out.insert(out.end(), candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  return out;
}

RocResult roc_auc(std::span<const std::pair<double, bool>> scored) {
  std::size_t pos = 0;
  for (const auto& [s, label] : scored) pos += label;
  const std::size_t neg = scored.size() - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorCode::kSingleClass, "ROC needs both positive and negative cases");

  std::vector<std::pair<double, bool>> sorted(scored.begin(), scored.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  RocResult r;
  r.curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  double area = 0.0;  // in units of pos * neg
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i, group_tp = 0, group_fp = 0;
    for (; j < sorted.size() && sorted[j].first == sorted[i].first; ++j) {
      (sorted[j].second ? group_tp : group_fp) += 1;
    }
    // A tied group sweeps a straight segment: half credit for tied pairs.
    area += static_cast<double>(group_fp) * (static_cast<double>(tp) + 0.5 * static_cast<double>(group_tp));
    tp += group_tp;
    fp += group_fp;
    r.curve.push_back({sorted[i].first, static_cast<double>(tp) / static_cast<double>(pos),
                       static_cast<double>(fp) / static_cast<double>(neg)});
    i = j;
  }
  r.auc = area / (static_cast<double>(pos) * static_cast<double>(neg));
  return r;
}

double youden_threshold(const RocResult& roc) {
  double best = -std::numeric_limits<double>::infinity();
  double threshold = std::numeric_limits<double>::infinity();
  for (const auto& p : roc.curve) {
    const double j = p.tpr - p.fpr;
    if (j >= best) {
      best = j;
      threshold = p.threshold;
    }
  }
  return threshold;
}

}  // namespace cannedbot::curation
