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

#include "kvmeta/meta_index.h"

#include <mutex>

#include "kvmeta/error.h"

namespace kvmeta {

MetaIndex::MetaIndex(StoreOptions options)
    : options_(std::move(options)),
      cache_(options_.cache, options_.clock ? options_.clock : steady_clock_seconds()) {}

bool MetaIndex::pin_on_insert_locked(const NamespaceTag& ns, BlockId id) {
  auto& pinned = pinned_ids_[ns];
  if (pinned.size() < options_.cache.pin_first_n) {
    pinned.insert(id);
    return true;
  }
  const BlockId highest = *pinned.rbegin();
  if (id > highest) return false;
  pinned.erase(highest);
  cache_.set_pinned(encode_key(ns, highest), false);
  pinned.insert(id);
  return true;
}

void MetaIndex::repin_after_erase_locked(const NamespaceTag& ns, BlockId id) {
  auto ns_it = pinned_ids_.find(ns);
  if (ns_it == pinned_ids_.end() || ns_it->second.erase(id) == 0) return;
  auto& pinned = ns_it->second;
  // Pinned ids are the lowest present ones, so the replacement is the first
  // present id above everything still pinned.
  const BlockId bound = pinned.empty() ? id : std::max(id, *pinned.rbegin());
  if (bound == UINT64_MAX) return;
  auto next = ordered_.lower_bound(encode_key(ns, bound + 1));
  if (next == ordered_.end()) return;
  const auto [next_ns, next_id] = decode_key(next->first);
  if (next_ns != ns) return;
  pinned.insert(next_id);
  cache_.admit(next->first, next->second, /*pinned=*/true);
}

std::optional<MetaValue> MetaIndex::put(const MetaKey& key, MetaValue value) {
  std::unique_lock lock(mu_);
  puts_.fetch_add(1, std::memory_order_relaxed);

  std::optional<MetaValue> previous;
  bool pinned = false;
  if (auto it = directory_.find(key); it != directory_.end()) {
    previous = it->second->second;
    it->second->second = value;
    pinned = cache_.is_pinned(key);
  } else {
    if (options_.max_entries > 0 && ordered_.size() >= options_.max_entries) {
      throw Error(ErrorCode::kResourceExhausted,
                  "store full: " + std::to_string(options_.max_entries) + " entries");
    }
    auto node = ordered_.emplace(key, value).first;
    directory_.emplace(key, node);
    if (options_.cache.pinning() && options_.scheme == KeyScheme::kOrdered) {
      const auto [ns, id] = decode_key(key);
      pinned = pin_on_insert_locked(ns, id);
    }
  }
  cache_.admit(key, value, pinned);
  return previous;
}

std::optional<MetaValue> MetaIndex::get(const MetaKey& key) {
  std::shared_lock lock(mu_);
  gets_.fetch_add(1, std::memory_order_relaxed);
  if (!cache_.enabled()) {
    auto it = directory_.find(key);
    if (it == directory_.end()) return std::nullopt;
    return it->second->second;
  }
  if (auto hit = cache_.lookup(key)) {
    cache_hits_.fetch_add(1, std::memory_order_relaxed);
    return hit;
  }
  cache_misses_.fetch_add(1, std::memory_order_relaxed);
  auto it = directory_.find(key);
  if (it == directory_.end()) return std::nullopt;
  cache_.admit(key, it->second->second, /*pinned=*/false);
  return it->second->second;
}

std::vector<ScanEntry> MetaIndex::scan(const MetaKey& start, const MetaKey& end_exclusive,
                                       std::uint32_t max_results) {
  if (options_.scheme == KeyScheme::kStrictHash) {
    throw Error(ErrorCode::kScansDisabled, "range scans are disabled under strict_hash keys");
  }
  if (!(start < end_exclusive)) {
    throw Error(ErrorCode::kBadRange, "scan requires start < end_exclusive");
  }
  std::shared_lock lock(mu_);
  scans_.fetch_add(1, std::memory_order_relaxed);
  std::vector<ScanEntry> out;
  for (auto it = ordered_.lower_bound(start);
       it != ordered_.end() && it->first < end_exclusive && out.size() < max_results; ++it) {
    out.push_back({it->first, it->second});
  }
  // Scanned blocks are about to be reused as a unit; keep them hot. Pinned
  // entries are already resident, so admitting unpinned is safe here.
  if (cache_.enabled()) {
    for (const auto& e : out) {
      if (!cache_.lookup(e.key)) cache_.admit(e.key, e.value, /*pinned=*/false);
    }
  }
  return out;
}

bool MetaIndex::erase(const MetaKey& key) {
  std::unique_lock lock(mu_);
  deletes_.fetch_add(1, std::memory_order_relaxed);
  auto it = directory_.find(key);
  if (it == directory_.end()) return false;
  ordered_.erase(it->second);
  directory_.erase(it);
  cache_.erase(key);
  if (options_.cache.pinning() && options_.scheme == KeyScheme::kOrdered) {
    const auto [ns, id] = decode_key(key);
    repin_after_erase_locked(ns, id);
  }
  return true;
}

IndexStats MetaIndex::stats() {
  std::unique_lock lock(mu_);
  IndexStats s;
  s.puts = puts_.load(std::memory_order_relaxed);
  s.gets = gets_.load(std::memory_order_relaxed);
  s.scans = scans_.load(std::memory_order_relaxed);
  s.deletes = deletes_.load(std::memory_order_relaxed);
  s.cache_hits = cache_hits_.load(std::memory_order_relaxed);
  s.cache_misses = cache_misses_.load(std::memory_order_relaxed);
  s.resident_entries = cache_.size();
  s.stored_entries = ordered_.size();
  return s;
}

std::uint64_t MetaIndex::size() const {
  std::shared_lock lock(mu_);
  return ordered_.size();
}

std::string MetaIndex::describe() const {
  const auto& c = options_.cache;
  std::string d = "inproc:scheme=" + std::string(key_scheme_name(options_.scheme));
  d += ",capacity=" + std::to_string(c.capacity_entries);
  d += ",policy=" + std::string(cache_policy_name(c.policy));
  d += ",pin=" + std::to_string(c.pin_first_n);
  d += ",halflife=" + std::to_string(c.hotness_halflife_s);
  d += ",max_entries=" + std::to_string(options_.max_entries);
  return d;
}

}  // namespace kvmeta
