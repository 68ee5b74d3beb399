// SPDX-License-Identifier: Apache-2.0
#include "cannedbot/serving/cache.hpp"

#include "cannedbot/corpus/text.hpp"

namespace cannedbot::serving {

namespace {

double rate(std::uint64_t hits, std::uint64_t misses) {
  const auto total = hits + misses;
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

double CacheStats::tier1_hit_rate() const { return rate(tier1_hits, tier1_misses); }
double CacheStats::tier2_hit_rate() const { return rate(tier2_hits, tier2_misses); }

EmbeddingCache::EmbeddingCache(std::shared_ptr<EmbeddingStore> tier1, std::size_t tier2_capacity, bool enabled)
    : tier1_(std::move(tier1)), tier2_(tier2_capacity), enabled_(enabled) {
  if (!tier1_) tier1_ = std::make_shared<InProcessEmbeddingStore>(100000);
}

Vector EmbeddingCache::embed(std::string_view text, const objectives::ResponseModel& model) {
  const std::string key = corpus::normalize_text(text);
  if (!enabled_) {
    ++computations_;
    return model.encoder().encode_utterance(model.params(), model.tokenize(key));
  }
  if (auto hit = tier1_->get(key)) {
    ++tier1_hits_;
    return *std::move(hit);
  }
  ++tier1_misses_;
  encoder::TokenRow row;
  if (auto enc = tier2_.get(key)) {
    ++tier2_hits_;
    row = *std::move(enc);
  } else {
    ++tier2_misses_;
    row = model.tokenize(key);
    tier2_.insert(key, row);
  }
  ++computations_;
  Vector v = model.encoder().encode_utterance(model.params(), row);
  tier1_->insert(key, v);
  return v;
}

CacheStats EmbeddingCache::stats() const {
  return {tier1_hits_.load(), tier1_misses_.load(), tier2_hits_.load(), tier2_misses_.load(), computations_.load()};
}

void EmbeddingCache::clear() {
  tier1_->clear();
  tier2_.clear();
}

}  // namespace cannedbot::serving
