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

#include "kvmeta/hot_cache.h"

#include <chrono>
#include <cmath>

#include "kvmeta/error.h"

namespace kvmeta {

void CacheConfig::validate() const {
  if (policy == CachePolicy::kLruPin && capacity_entries > 0 && pin_first_n > capacity_entries) {
    throw Error(ErrorCode::kInvalidArgument, "pin_first_n exceeds capacity_entries");
  }
  if (!(hotness_halflife_s >= 0.0) || std::isinf(hotness_halflife_s)) {
    throw Error(ErrorCode::kInvalidArgument, "hotness_halflife_s must be finite and >= 0");
  }
}

std::string_view cache_policy_name(CachePolicy policy) {
  return policy == CachePolicy::kLru ? "lru" : "lru_pin";
}

CachePolicy parse_cache_policy(std::string_view name) {
  if (name == "lru") return CachePolicy::kLru;
  if (name == "lru_pin") return CachePolicy::kLruPin;
  throw Error(ErrorCode::kInvalidArgument, "unknown cache policy '" + std::string(name) + "'");
}

ClockFn steady_clock_seconds() {
  const auto origin = std::chrono::steady_clock::now();
  return [origin] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin).count();
  };
}

HotCache::HotCache(CacheConfig config, ClockFn clock)
    : config_(config), clock_(clock ? std::move(clock) : steady_clock_seconds()) {
  config_.validate();
}

void HotCache::detach_locked(const MetaKey& key, const Entry& e) {
  if (e.pinned) {
    --pinned_;
  } else {
    evictable_.erase(order_of(key, e));
  }
}

void HotCache::attach_locked(const MetaKey& key, const Entry& e) {
  if (e.pinned) {
    ++pinned_;
  } else {
    evictable_.insert(order_of(key, e));
  }
}

void HotCache::record_access(Entry& e) {
  const double now = clock_();
  if (config_.policy == CachePolicy::kLruPin && config_.hotness_halflife_s > 0.0) {
    const double dt = now > e.last_touch ? now - e.last_touch : 0.0;
    e.count = e.count * std::exp2(-dt / config_.hotness_halflife_s) + 1.0;
    e.score = std::log2(e.count) + now / config_.hotness_halflife_s;
  } else {
    e.count += 1.0;
    e.score = 0.0;
  }
  e.last_touch = now;
  e.seq = next_seq_++;
}

void HotCache::evict_locked() {
  while (entries_.size() > config_.capacity_entries && !evictable_.empty()) {
    auto victim = evictable_.begin();
    entries_.erase(std::get<2>(*victim));
    evictable_.erase(victim);
  }
}

std::optional<MetaValue> HotCache::lookup(const MetaKey& key) {
  if (!enabled()) return std::nullopt;
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  detach_locked(key, it->second);
  record_access(it->second);
  attach_locked(key, it->second);
  return it->second.value;
}

void HotCache::admit(const MetaKey& key, MetaValue value, bool pinned) {
  if (!enabled()) return;
  std::lock_guard lock(mu_);
  auto [it, inserted] = entries_.try_emplace(key);
  Entry& e = it->second;
  if (inserted) {
    e.last_touch = clock_();
  } else {
    detach_locked(key, e);
  }
  e.value = value;
  e.pinned = pinned;
  record_access(e);
  attach_locked(key, e);
  evict_locked();
}

void HotCache::set_pinned(const MetaKey& key, bool pinned) {
  if (!enabled()) return;
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end() || it->second.pinned == pinned) return;
  detach_locked(key, it->second);
  it->second.pinned = pinned;
  attach_locked(key, it->second);
  evict_locked();
}

void HotCache::erase(const MetaKey& key) {
  if (!enabled()) return;
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return;
  detach_locked(key, it->second);
  entries_.erase(it);
}

bool HotCache::contains(const MetaKey& key) const {
  std::lock_guard lock(mu_);
  return entries_.contains(key);
}

bool HotCache::is_pinned(const MetaKey& key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  return it != entries_.end() && it->second.pinned;
}

std::uint64_t HotCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::uint64_t HotCache::pinned_count() const {
  std::lock_guard lock(mu_);
  return pinned_;
}

}  // namespace kvmeta
