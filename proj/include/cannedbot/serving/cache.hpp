// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cannedbot/objectives/response_model.hpp"

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cannedbot::serving {

using numerics::Vector;

/// Thread-safe bounded map with strict least-recently-used eviction. Both
/// get and put count as a use.
template <typename V>
class LruCache {
 public:
  explicit LruCache(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  std::optional<V> get(const std::string& key) {
    std::lock_guard lock(mu_);
    const auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    order_.splice(order_.begin(), order_, it->second);
    return it->second->second;
  }

  /// Inserts unless present (a present key is only touched); returns whether
  /// it inserted. Evicts the least recently used key beyond capacity.
  bool insert(const std::string& key, V value) {
    std::lock_guard lock(mu_);
    const auto it = index_.find(key);
    if (it != index_.end()) {
      order_.splice(order_.begin(), order_, it->second);
      return false;
    }
    order_.emplace_front(key, std::move(value));
    index_.emplace(key, order_.begin());
    if (order_.size() > capacity_) {
      index_.erase(order_.back().first);
      order_.pop_back();
    }
    return true;
  }

  bool contains(const std::string& key) const {
    std::lock_guard lock(mu_);
    return index_.count(key) != 0;
  }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return order_.size();
  }
  std::size_t capacity() const { return capacity_; }
  void clear() {
    std::lock_guard lock(mu_);
    order_.clear();
    index_.clear();
  }
  /// Most recently used first.
  std::vector<std::string> keys() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [k, v] : order_) out.push_back(k);
    return out;
  }

 private:
  using Entry = std::pair<std::string, V>;
  mutable std::mutex mu_;
  std::size_t capacity_;
  std::list<Entry> order_;
  std::unordered_map<std::string, typename std::list<Entry>::iterator> index_;
};

/// Tier 1: normalized text -> final utterance embedding, shared by every
/// serving process. An external key-value store plugs in behind this
/// interface.
class EmbeddingStore {
 public:
  virtual ~EmbeddingStore() = default;
  virtual std::optional<Vector> get(const std::string& key) = 0;
  /// Atomic per key: returns false and keeps the stored value if present.
  virtual bool insert(const std::string& key, const Vector& value) = 0;
  virtual std::size_t size() const = 0;
  virtual void clear() = 0;
};

class InProcessEmbeddingStore final : public EmbeddingStore {
 public:
  explicit InProcessEmbeddingStore(std::size_t capacity) : map_(capacity) {}
  std::optional<Vector> get(const std::string& key) override { return map_.get(key); }
  bool insert(const std::string& key, const Vector& value) override { return map_.insert(key, value); }
  std::size_t size() const override { return map_.size(); }
  void clear() override { map_.clear(); }

 private:
  LruCache<Vector> map_;
};

struct CacheStats {
  std::uint64_t tier1_hits = 0;
  std::uint64_t tier1_misses = 0;
  std::uint64_t tier2_hits = 0;
  std::uint64_t tier2_misses = 0;
  /// Utterance encoder runs.
  std::uint64_t computations = 0;

  double tier1_hit_rate() const;
  double tier2_hit_rate() const;
};

/// Two-tier utterance embedding cache. Tier 2 is per process and holds the
/// token encoding of a text; tier 1 holds the embedding. Keys are
/// normalize_text(text). Disabled, every call tokenizes and computes.
class EmbeddingCache {
 public:
  EmbeddingCache(std::shared_ptr<EmbeddingStore> tier1, std::size_t tier2_capacity, bool enabled = true);

  /// Context-side utterance embedding of `text` under `model`.
  Vector embed(std::string_view text, const objectives::ResponseModel& model);

  CacheStats stats() const;
  bool enabled() const { return enabled_; }
  EmbeddingStore& tier1() { return *tier1_; }
  LruCache<encoder::TokenRow>& tier2() { return tier2_; }
  /// Drops both tiers (counters are kept); needed when the model changes.
  void clear();

 private:
  std::shared_ptr<EmbeddingStore> tier1_;
  LruCache<encoder::TokenRow> tier2_;
  bool enabled_;
  std::atomic<std::uint64_t> tier1_hits_{0}, tier1_misses_{0}, tier2_hits_{0}, tier2_misses_{0}, computations_{0};
};

}  // namespace cannedbot::serving
