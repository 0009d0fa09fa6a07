/* Copyright 2026 The kvmeta Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>

#include "kvmeta/meta_key.h"

namespace kvmeta {

enum class CachePolicy {
  kLru,     // recency only
  kLruPin,  // pinned low ids + decayed-hotness eviction among the rest
};

struct CacheConfig {
  std::uint64_t capacity_entries = 0;  // 0 disables the cache layer
  CachePolicy policy = CachePolicy::kLru;
  std::uint64_t pin_first_n = 16;      // per namespace, kLruPin only
  double hotness_halflife_s = 600.0;   // 0 falls back to recency order

  bool enabled() const { return capacity_entries > 0; }
  bool pinning() const { return enabled() && policy == CachePolicy::kLruPin && pin_first_n > 0; }

  // Throws Error(kInvalidArgument) on inconsistent settings.
  void validate() const;
};

std::string_view cache_policy_name(CachePolicy policy);
CachePolicy parse_cache_policy(std::string_view name);

// Seconds on a monotonic clock; injectable so simulations can use trace time.
using ClockFn = std::function<double()>;
ClockFn steady_clock_seconds();

// Bounded entry cache in front of the index. Unpinned entries are evicted in
// (hotness, last access) order; under kLru or a zero half-life every hotness
// is equal and the order is plain LRU. Pinned entries are never evicted, so
// residency may exceed capacity only by pinned entries.
//
// Hotness is an access counter decayed by 2^(-dt / halflife). It is stored as
// log2(count) + t / halflife, which orders entries by their current decayed
// count without touching every entry as time advances.
//
// Thread-safe.
class HotCache {
 public:
  HotCache(CacheConfig config, ClockFn clock);

  bool enabled() const { return config_.enabled(); }
  const CacheConfig& config() const { return config_; }

  // Returns the cached value and records an access.
  std::optional<MetaValue> lookup(const MetaKey& key);
  // Inserts or refreshes an entry, records an access, then evicts.
  void admit(const MetaKey& key, MetaValue value, bool pinned);
  // Changes the pin state of a resident entry; no-op if absent.
  void set_pinned(const MetaKey& key, bool pinned);
  void erase(const MetaKey& key);

  bool contains(const MetaKey& key) const;
  bool is_pinned(const MetaKey& key) const;
  std::uint64_t size() const;
  std::uint64_t pinned_count() const;

 private:
  using Order = std::tuple<double, std::uint64_t, MetaKey>;

  struct Entry {
    MetaValue value;
    double count = 0.0;   // decayed access count as of last_touch
    double last_touch = 0.0;
    std::uint64_t seq = 0;
    double score = 0.0;
    bool pinned = false;
  };

  void detach_locked(const MetaKey& key, const Entry& e);
  void attach_locked(const MetaKey& key, const Entry& e);
  void record_access(Entry& e);
  void evict_locked();
  Order order_of(const MetaKey& key, const Entry& e) const { return {e.score, e.seq, key}; }

  CacheConfig config_;
  ClockFn clock_;
  mutable std::mutex mu_;
  std::unordered_map<MetaKey, Entry, MetaKeyHash> entries_;
  std::set<Order> evictable_;
  std::uint64_t pinned_ = 0;
  std::uint64_t next_seq_ = 0;
};

}  // namespace kvmeta
