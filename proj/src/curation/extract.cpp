// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/curation/extract.hpp"

#include "cannedbot/corpus/text.hpp"
#include "cannedbot/curation/kmeans.hpp"
#include "cannedbot/error.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace cannedbot::curation {

std::vector<UtteranceCount> count_agent_utterances(const std::vector<corpus::Dialogue>& dialogues) {
  std::map<std::string, std::map<std::string, std::size_t>> variants;
  for (const auto& d : dialogues) {
    for (const auto& u : d.utterances) {
      if (u.speaker != corpus::Speaker::kAgent) continue;
      std::string norm = corpus::normalize_text(u.text);
      if (!norm.empty()) ++variants[std::move(norm)][u.text];
    }
  }
  std::vector<UtteranceCount> out;
  for (const auto& [norm, forms] : variants) {
    UtteranceCount c;
    c.normalized = norm;
    std::size_t best = 0;
    for (const auto& [text, n] : forms) {
      c.count += n;
      if (n > best) {
        best = n;
        c.text = text;
      }
    }
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
  return out;
}

CannedList extract_canned_list(const std::vector<corpus::Dialogue>& dialogues,
                               const encoder::UtteranceEmbedder& embedder, const ExtractOptions& options) {
  if (options.k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (options.top_n < static_cast<std::size_t>(options.k)) {
    throw Error(ErrorCode::kInvalidArgument, "top_n must be at least k");
  }
  auto counts = count_agent_utterances(dialogues);
  if (counts.size() < static_cast<std::size_t>(options.k)) {
    throw Error(ErrorCode::kTooFewUniqueUtterances,
                std::to_string(counts.size()) + " distinct agent utterances for k = " + std::to_string(options.k));
  }
  if (counts.size() > options.top_n) counts.resize(options.top_n);

  std::vector<std::string> texts;
  for (const auto& c : counts) texts.push_back(c.normalized);
  const Tensor points = embedder.embed_all(texts);
  const KMeansResult km = kmeans(points, options.k, options.seed, options.max_iter);

  struct Representative {
    std::size_t member = 0;
    Real distance = 0.0;
    std::size_t cluster_frequency = 0;
    bool present = false;
  };
  std::vector<Representative> reps(static_cast<std::size_t>(options.k));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto c = static_cast<std::size_t>(km.assignments[i]);
    Representative& r = reps[c];
    r.cluster_frequency += counts[i].count;
    const Real d = (points.row(static_cast<Eigen::Index>(i)) - km.centroids.row(static_cast<Eigen::Index>(c))).squaredNorm();
    // counts is frequency-ordered, so strict < keeps the more frequent member on ties.
    if (!r.present || d < r.distance) {
      r.member = i;
      r.distance = d;
      r.present = true;
    }
  }
  std::vector<std::size_t> order(reps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (reps[a].cluster_frequency != reps[b].cluster_frequency) {
      return reps[a].cluster_frequency > reps[b].cluster_frequency;
    }
    return reps[a].member < reps[b].member;
  });

  CannedList list;
  std::vector<Vector> kept;
  for (std::size_t c : order) {
    const Representative& r = reps[c];
    if (!r.present) continue;
    const Vector v = points.row(static_cast<Eigen::Index>(r.member));
    bool duplicate = false;
    for (std::size_t k = 0; k < kept.size() && !duplicate; ++k) {
      duplicate = list.responses()[k].normalized == counts[r.member].normalized ||
                  cosine_similarity(v, kept[k]) >= options.dedup_threshold;
    }
    if (duplicate) continue;
    list.append(counts[r.member].text, counts[r.member].count, static_cast<int>(c));
    kept.push_back(v);
  }
  return list;
}

}  // namespace cannedbot::curation
