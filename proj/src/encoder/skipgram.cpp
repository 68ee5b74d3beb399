// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/encoder/skipgram.hpp"

#include "cannedbot/error.hpp"
#include "cannedbot/numerics/layers.hpp"
#include "cannedbot/numerics/ops.hpp"
#include "cannedbot/numerics/rng.hpp"

#include <algorithm>
#include <cmath>

namespace cannedbot::encoder {

namespace {

using numerics::Real;
using numerics::Rng;
using numerics::Tensor;

std::vector<std::vector<int>> sentences(const std::vector<corpus::Dialogue>& dialogues,
                                        const corpus::Vocabulary& vocab) {
  std::vector<std::vector<int>> out;
  for (const auto& d : dialogues) {
    for (const auto& u : d.utterances) {
      auto ids = vocab.encode(u.text);
      if (ids.size() >= 2) out.push_back(std::move(ids));
    }
  }
  return out;
}

/// Alias-free inverse-CDF table over unigram^0.75.
struct NoiseTable {
  std::vector<double> cdf;

  NoiseTable(const std::vector<std::vector<int>>& sents, std::size_t vocab_size) {
    std::vector<double> counts(vocab_size, 0.0);
    for (const auto& s : sents)
      for (int id : s) counts[static_cast<std::size_t>(id)] += 1.0;
    cdf.resize(vocab_size);
    double acc = 0.0;
    for (std::size_t i = 0; i < vocab_size; ++i) {
      acc += std::pow(counts[i], 0.75);
      cdf[i] = acc;
    }
    if (acc <= 0.0) throw Error(ErrorCode::kEmptyDataset, "no tokens for skip-gram");
    for (double& c : cdf) c /= acc;
  }

  int draw(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
  }
};

void validate(const SkipGramConfig& c) {
  if (c.dim < 1 || c.window < 1 || c.negatives < 1 || c.epochs < 0 || !(c.learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid skip-gram config");
  }
}

}  // namespace

SkipGramVectors train_skipgram(const std::vector<corpus::Dialogue>& dialogues, const corpus::Vocabulary& vocab,
                      const SkipGramConfig& config) {
  validate(config);
  const auto sents = sentences(dialogues, vocab);
  if (sents.empty()) throw Error(ErrorCode::kEmptyDataset, "no sentences for skip-gram");
  const NoiseTable noise(sents, vocab.size());
  Rng rng(config.seed);
  const auto V = static_cast<Eigen::Index>(vocab.size());
  Tensor in = numerics::uniform_tensor(V, config.dim, 0.5 / config.dim, rng);
  Tensor out = Tensor::Zero(V, config.dim);

  std::size_t total_pairs = 0;
  for (const auto& s : sents) total_pairs += s.size();
  total_pairs *= static_cast<std::size_t>(config.epochs);
  std::size_t seen = 0;
  numerics::Vector grad_in(config.dim);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& s : sents) {
      for (std::size_t i = 0; i < s.size(); ++i, ++seen) {
        const Real progress = total_pairs == 0 ? 0.0 : static_cast<Real>(seen) / total_pairs;
        const Real lr = config.learning_rate * std::max(1e-4, 1.0 - progress);
        const auto reach = 1 + rng.index(static_cast<std::size_t>(config.window));
        const std::size_t lo = i >= reach ? i - reach : 0;
        const std::size_t hi = std::min(s.size() - 1, i + reach);
        const auto centre = static_cast<Eigen::Index>(s[i]);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          grad_in.setZero();
          for (int k = 0; k <= config.negatives; ++k) {
            const int target = k == 0 ? s[j] : noise.draw(rng);
            if (k > 0 && target == s[j]) continue;
            const Real label = k == 0 ? 1.0 : 0.0;
            auto o = out.row(target);
            const Real score = numerics::sigmoid(in.row(centre).dot(o));
            const Real step = lr * (label - score);
            grad_in += step * o;
            o += step * in.row(centre);
          }
          in.row(centre) += grad_in;
        }
      }
    }
  }
  numerics::require_finite(in, "train_skipgram");
  return {std::move(in), std::move(out)};
}

double skipgram_loss(const std::vector<corpus::Dialogue>& dialogues, const corpus::Vocabulary& vocab,
                     const Tensor& input_vectors, const Tensor& output_vectors,
                     const SkipGramConfig& config) {
  validate(config);
  const auto sents = sentences(dialogues, vocab);
  if (sents.empty()) throw Error(ErrorCode::kEmptyDataset, "no sentences for skip-gram");
  const NoiseTable noise(sents, vocab.size());
  Rng rng(config.seed ^ 0x5eedULL);
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& s : sents) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i >= 1 ? i - 1 : 0; j <= std::min(s.size() - 1, i + 1); ++j) {
        if (j == i) continue;
        double l = -std::log(numerics::sigmoid(input_vectors.row(s[i]).dot(output_vectors.row(s[j]))));
        for (int k = 0; k < config.negatives; ++k) {
          const int neg = noise.draw(rng);
          l -= std::log(numerics::sigmoid(-input_vectors.row(s[i]).dot(output_vectors.row(neg))));
        }
        total += l;
        ++n;
      }
    }
  }
  return total / static_cast<double>(n);
}

}  // namespace cannedbot::encoder
