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
#include <optional>
#include <string>
#include <vector>

#include "kvmeta/meta_key.h"

namespace kvmeta {

struct IndexStats {
  std::uint64_t puts = 0;
  std::uint64_t gets = 0;
  std::uint64_t scans = 0;
  std::uint64_t deletes = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t resident_entries = 0;  // entries held by the hot cache
  std::uint64_t stored_entries = 0;    // entries held by the index

  bool operator==(const IndexStats&) const = default;
};

// Operation set every metadata backend provides. Implementations must be
// observationally equivalent on results for any op sequence; only latency
// and stats may differ.
//
// Single operations are linearizable. A scan may interleave with concurrent
// writers: every entry it returns was present at some instant during the
// scan. Errors are reported as kvmeta::Error; transport failures are never
// reported as a miss.
class Backend {
 public:
  virtual ~Backend() = default;

  // Returns the previous value, if any.
  virtual std::optional<MetaValue> put(const MetaKey& key, MetaValue value) = 0;
  virtual std::optional<MetaValue> get(const MetaKey& key) = 0;
  // Entries with start <= key < end_exclusive in increasing key order, at
  // most max_results of them. Error(kBadRange) unless start < end_exclusive.
  virtual std::vector<ScanEntry> scan(const MetaKey& start, const MetaKey& end_exclusive,
                                      std::uint32_t max_results) = 0;
  // True iff the key was present.
  virtual bool erase(const MetaKey& key) = 0;
  virtual IndexStats stats() = 0;
  virtual std::string describe() const = 0;
};

}  // namespace kvmeta
