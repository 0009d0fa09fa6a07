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

#include "kvmeta/op_compiler.h"

#include <limits>
#include <unordered_set>

#include "kvmeta/analysis.h"
#include "kvmeta/error.h"

namespace kvmeta {

std::string_view op_kind_name(OpKind kind) {
  switch (kind) {
    case OpKind::kPointGet: return "point_get";
    case OpKind::kRangeScan: return "range_scan";
    case OpKind::kInsert: return "insert";
  }
  return "unknown";
}

OpKind parse_op_kind(std::string_view name) {
  for (auto k : kAllOpKinds) {
    if (op_kind_name(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown op kind '" + std::string(name) + "'");
}

std::string_view compile_mode_name(CompileMode mode) {
  return mode == CompileMode::kPreload ? "preload" : "insert_on_miss";
}

CompileMode parse_compile_mode(std::string_view name) {
  if (name == "preload") return CompileMode::kPreload;
  if (name == "insert_on_miss") return CompileMode::kInsertOnMiss;
  throw Error(ErrorCode::kInvalidArgument, "unknown mode '" + std::string(name) + "'");
}

std::uint64_t OpStream::covered_positions() const {
  std::uint64_t n = 0;
  for (const auto& op : ops) n += op.span;
  return n;
}

MetaKey key_successor(const MetaKey& key) {
  MetaKey next = key;
  for (std::size_t i = next.bytes.size(); i-- > 0;) {
    if (++next.bytes[i] != 0) return next;
  }
  throw Error(ErrorCode::kInvalidArgument, "key has no successor");
}

namespace {

std::vector<BlockId> split_chunks(const std::vector<BlockId>& ids, std::uint64_t k) {
  if (k == 1) return ids;
  std::vector<BlockId> out;
  out.reserve(ids.size() * k);
  for (BlockId b : ids) {
    if (b > (std::numeric_limits<BlockId>::max() - (k - 1)) / k) {
      throw Error(ErrorCode::kInvalidArgument,
                  "chunk split overflows block id " + std::to_string(b));
    }
    for (std::uint64_t j = 0; j < k; ++j) out.push_back(b * k + j);
  }
  return out;
}

class Emitter {
 public:
  Emitter(const CompileOptions& options, OpStream& stream, std::uint64_t issue_ms,
          std::uint64_t ordinal)
      : opt_(options), stream_(stream), issue_ms_(issue_ms), ordinal_(ordinal) {}

  void reads(std::span<const BlockId> ids) {
    if (opt_.scheme == KeyScheme::kStrictHash) {
      for (BlockId id : ids) point(OpKind::kPointGet, id);
      return;
    }
    for (const auto& run : segment_runs(ids)) {
      if (run.length == 1) {
        point(OpKind::kPointGet, run.start_id);
        continue;
      }
      MetadataOp op = base(OpKind::kRangeScan, run.start_id);
      op.end_exclusive = key_successor(encode_key(opt_.ns, run.start_id + (run.length - 1)));
      op.span = static_cast<std::uint32_t>(run.length);
      stream_.ops.push_back(op);
    }
  }

  void insert(BlockId id) { point(OpKind::kInsert, id); }

 private:
  MetadataOp base(OpKind kind, BlockId id) const {
    MetadataOp op;
    op.kind = kind;
    op.key = make_key(opt_.scheme, opt_.ns, id);
    op.first_id = id;
    op.issue_ms = issue_ms_;
    op.request_ordinal = ordinal_;
    return op;
  }

  void point(OpKind kind, BlockId id) {
    MetadataOp op = base(kind, id);
    if (kind == OpKind::kInsert) op.value = MetaValue{id};
    stream_.ops.push_back(op);
  }

  const CompileOptions& opt_;
  OpStream& stream_;
  std::uint64_t issue_ms_;
  std::uint64_t ordinal_;
};

}  // namespace

OpStream compile_ops(const Trace& trace, const CompileOptions& options) {
  if (options.chunk_split == 0) {
    throw Error(ErrorCode::kInvalidArgument, "chunk_split must be >= 1");
  }
  OpStream stream;
  std::unordered_set<BlockId> seen;

  for (std::size_t r = 0; r < trace.requests.size(); ++r) {
    const auto& req = trace.requests[r];
    const auto ids = split_chunks(req.block_ids, options.chunk_split);
    Emitter emit(options, stream, req.arrival_ms, r);

    if (options.mode == CompileMode::kPreload) {
      for (BlockId id : ids) {
        if (seen.insert(id).second) {
          stream.preload.push_back({make_key(options.scheme, options.ns, id), MetaValue{id}});
        }
      }
      emit.reads(ids);
      continue;
    }

    // Reads are grouped into maximal stretches between inserts so a run never
    // spans a block that does not exist yet.
    std::size_t stretch = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!seen.insert(ids[i]).second) continue;
      emit.reads(std::span(ids).subspan(stretch, i - stretch));
      emit.insert(ids[i]);
      stretch = i + 1;
    }
    emit.reads(std::span(ids).subspan(stretch));
  }
  return stream;
}

}  // namespace kvmeta
