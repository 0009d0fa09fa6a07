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

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "kvmeta/backend.h"
#include "kvmeta/hot_cache.h"
#include "kvmeta/meta_key.h"

namespace kvmeta {

struct StoreOptions {
  CacheConfig cache;
  KeyScheme scheme = KeyScheme::kOrdered;
  std::uint64_t max_entries = 0;  // 0 = unbounded
  ClockFn clock;                  // defaults to steady_clock_seconds()
};

// In-process metadata store.
//
// One logical map with two access paths kept in lockstep: a hash directory
// serving point gets and an ordered index serving range scans. The directory
// maps each key to its node in the ordered index, so both paths observe every
// update under the same writer lock. Scans hold the reader lock for their
// whole extent and are therefore consistent snapshots.
//
// With CachePolicy::kLruPin the pin_first_n lowest present ids of every
// namespace are pinned in the hot cache from their first put; when a pinned
// id is deleted the next-lowest present id takes its place.
class MetaIndex final : public Backend {
 public:
  explicit MetaIndex(StoreOptions options = {});

  std::optional<MetaValue> put(const MetaKey& key, MetaValue value) override;
  std::optional<MetaValue> get(const MetaKey& key) override;
  std::vector<ScanEntry> scan(const MetaKey& start, const MetaKey& end_exclusive,
                              std::uint32_t max_results) override;
  bool erase(const MetaKey& key) override;
  IndexStats stats() override;
  std::string describe() const override;

  std::uint64_t size() const;
  const StoreOptions& options() const { return options_; }
  // True if the key is resident and pinned in the hot cache.
  bool is_pinned(const MetaKey& key) const { return cache_.is_pinned(key); }

 private:
  using OrderedMap = std::map<MetaKey, MetaValue>;

  bool pin_on_insert_locked(const NamespaceTag& ns, BlockId id);
  void repin_after_erase_locked(const NamespaceTag& ns, BlockId id);

  StoreOptions options_;
  mutable std::shared_mutex mu_;
  OrderedMap ordered_;
  std::unordered_map<MetaKey, OrderedMap::iterator, MetaKeyHash> directory_;
  HotCache cache_;
  std::map<NamespaceTag, std::set<BlockId>> pinned_ids_;

  std::atomic<std::uint64_t> puts_{0};
  std::atomic<std::uint64_t> gets_{0};
  std::atomic<std::uint64_t> scans_{0};
  std::atomic<std::uint64_t> deletes_{0};
  std::atomic<std::uint64_t> cache_hits_{0};
  std::atomic<std::uint64_t> cache_misses_{0};
};

}  // namespace kvmeta
