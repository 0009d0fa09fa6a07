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
#include <string_view>
#include <vector>

#include "kvmeta/backend.h"
#include "kvmeta/meta_key.h"
#include "kvmeta/trace.h"

namespace kvmeta {

enum class OpKind : std::uint8_t { kPointGet, kRangeScan, kInsert };

inline constexpr OpKind kAllOpKinds[] = {OpKind::kPointGet, OpKind::kRangeScan, OpKind::kInsert};

std::string_view op_kind_name(OpKind kind);  // point_get | range_scan | insert
OpKind parse_op_kind(std::string_view name);

struct MetadataOp {
  OpKind kind = OpKind::kPointGet;
  MetaKey key;            // get/insert key, or scan start
  MetaKey end_exclusive;  // scans only
  MetaValue value;        // inserts only
  std::uint32_t span = 1; // block positions covered; the run length for scans
  BlockId first_id = 0;
  std::uint64_t issue_ms = 0;
  std::uint64_t request_ordinal = 0;
};

struct OpStream {
  std::vector<MetadataOp> ops;
  // Installed untimed before replay (preload mode).
  std::vector<ScanEntry> preload;

  std::uint64_t covered_positions() const;
};

enum class CompileMode {
  kPreload,      // every distinct block installed up front; all ops are reads
  kInsertOnMiss, // first sighting of a block is an Insert
};

std::string_view compile_mode_name(CompileMode mode);
CompileMode parse_compile_mode(std::string_view name);

struct CompileOptions {
  CompileMode mode = CompileMode::kPreload;
  NamespaceTag ns{};
  std::uint64_t chunk_split = 1;
  // Under kStrictHash contiguity is invisible to the store, so every block
  // position compiles to its own PointGet.
  KeyScheme scheme = KeyScheme::kOrdered;
};

// Turns each request into metadata operations: a RangeScan per maximal run of
// two or more consecutive ids, a PointGet per isolated id. With chunk_split
// k > 1 every id b is first replaced by b*k .. b*k+k-1. Insert values are the
// block id itself. Throws Error(kInvalidArgument) for chunk_split 0 or when a
// split id overflows 64 bits.
OpStream compile_ops(const Trace& trace, const CompileOptions& options);

// Big-endian successor of a 32-byte key. Throws on the all-0xFF key.
MetaKey key_successor(const MetaKey& key);

}  // namespace kvmeta
