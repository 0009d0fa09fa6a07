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

#include <sstream>

#include <gtest/gtest.h>

#include "kvmeta/error.h"
#include "kvmeta/op_compiler.h"
#include "test_support.h"

namespace kvmeta {
namespace {

using testing::fixture;

const NamespaceTag kNs = make_namespace("kvmeta");

// Compact, comparable rendering of an op: "I7", "G7", "S[1,4)".
std::string render(const MetadataOp& op) {
  const BlockId first = decode_key(op.key).second;
  switch (op.kind) {
    case OpKind::kInsert:
      EXPECT_EQ(op.value.address, first);
      return "I" + std::to_string(first);
    case OpKind::kPointGet:
      return "G" + std::to_string(first);
    case OpKind::kRangeScan: {
      const BlockId end = decode_key(op.end_exclusive).second;
      EXPECT_EQ(op.span, end - first);
      return "S[" + std::to_string(first) + "," + std::to_string(end) + ")";
    }
  }
  return "?";
}

std::vector<std::vector<std::string>> by_request(const OpStream& s, std::size_t requests) {
  std::vector<std::vector<std::string>> out(requests);
  for (const auto& op : s.ops) out.at(op.request_ordinal).push_back(render(op));
  return out;
}

Trace single(std::vector<BlockId> ids) {
  Trace t;
  t.requests.push_back({0, 0, 0, std::move(ids)});
  return t;
}

CompileOptions opts(CompileMode mode, std::uint64_t split = 1) {
  CompileOptions o;
  o.mode = mode;
  o.ns = kNs;
  o.chunk_split = split;
  return o;
}

using Ops = std::vector<std::string>;

TEST(CompileOps, PreloadSingleRequest) {
  const auto s = compile_ops(single({1, 2, 3, 7}), opts(CompileMode::kPreload));
  EXPECT_EQ(by_request(s, 1)[0], (Ops{"S[1,4)", "G7"}));
  ASSERT_EQ(s.preload.size(), 4u);
  EXPECT_EQ(decode_key(s.preload[3].key).second, 7u);
  EXPECT_EQ(s.preload[3].value.address, 7u);
  EXPECT_EQ(s.covered_positions(), 4u);
}

TEST(CompileOps, InsertOnMissSameRequestTwice) {
  Trace t;
  t.requests.push_back({0, 0, 0, {1, 2, 3, 7}});
  t.requests.push_back({10, 0, 0, {1, 2, 3, 7}});
  const auto s = compile_ops(t, opts(CompileMode::kInsertOnMiss));
  const auto r = by_request(s, 2);
  EXPECT_EQ(r[0], (Ops{"I1", "I2", "I3", "I7"}));
  EXPECT_EQ(r[1], (Ops{"S[1,4)", "G7"}));
  EXPECT_TRUE(s.preload.empty());
}

TEST(CompileOps, ChunkSplitTwo) {
  const auto s = compile_ops(single({1, 2, 3, 7}), opts(CompileMode::kPreload, 2));
  EXPECT_EQ(by_request(s, 1)[0], (Ops{"S[2,8)", "S[14,16)"}));
  EXPECT_EQ(s.covered_positions(), 8u);
}

TEST(CompileOps, SixRequestFixtureInsertOnMiss) {
  const auto trace = load_trace(fixture("six_requests.jsonl")).trace;
  const auto s = compile_ops(trace, opts(CompileMode::kInsertOnMiss));
  const auto r = by_request(s, 6);
  EXPECT_EQ(r[0], (Ops{"I1", "I2", "I3", "I7"}));
  EXPECT_EQ(r[1], (Ops{"S[1,4)", "G7"}));
  EXPECT_EQ(r[2], (Ops{"I5", "I6", "G7", "I42", "I9", "I10"}));
  EXPECT_EQ(r[3], (Ops{"G3", "G9", "I27"}));
  EXPECT_EQ(r[4], (Ops{"G10", "I11", "I12"}));
  EXPECT_EQ(r[5], (Ops{"S[1,3)", "G9"}));
  EXPECT_EQ(s.covered_positions(), trace.total_blocks());
  for (const auto& op : s.ops) EXPECT_EQ(op.issue_ms, trace.requests[op.request_ordinal].arrival_ms);
}

TEST(CompileOps, SixRequestFixturePreload) {
  const auto trace = load_trace(fixture("six_requests.jsonl")).trace;
  const auto s = compile_ops(trace, opts(CompileMode::kPreload));
  const auto r = by_request(s, 6);
  EXPECT_EQ(r[0], (Ops{"S[1,4)", "G7"}));
  EXPECT_EQ(r[2], (Ops{"S[5,8)", "G42", "S[9,11)"}));
  EXPECT_EQ(r[3], (Ops{"G3", "G9", "G27"}));
  EXPECT_EQ(r[4], (Ops{"S[10,13)"}));
  EXPECT_EQ(s.preload.size(), 12u);  // distinct ids
}

TEST(CompileOps, ChunkSplitMultipliesCoverage) {
  const auto trace = load_trace(fixture("six_requests.jsonl")).trace;
  const auto base = compile_ops(trace, opts(CompileMode::kPreload)).covered_positions();
  for (std::uint64_t k : {2, 3, 8}) {
    EXPECT_EQ(compile_ops(trace, opts(CompileMode::kPreload, k)).covered_positions(), base * k);
    EXPECT_EQ(compile_ops(trace, opts(CompileMode::kInsertOnMiss, k)).covered_positions(), base * k);
  }
}

TEST(CompileOps, StrictHashIsAllPointGets) {
  auto o = opts(CompileMode::kPreload);
  o.scheme = KeyScheme::kStrictHash;
  const auto s = compile_ops(single({1, 2, 3, 7}), o);
  ASSERT_EQ(s.ops.size(), 4u);
  for (const auto& op : s.ops) {
    EXPECT_EQ(op.kind, OpKind::kPointGet);
    EXPECT_EQ(op.key, hashed_key(kNs, op.first_id));
  }
}

TEST(CompileOps, Errors) {
  EXPECT_THROW(compile_ops(single({1}), opts(CompileMode::kPreload, 0)), Error);
  EXPECT_THROW(compile_ops(single({~0ULL / 2}), opts(CompileMode::kPreload, 4)), Error);
  EXPECT_TRUE(compile_ops(Trace{}, opts(CompileMode::kPreload)).ops.empty());
}

TEST(KeySuccessor, CarriesAcrossBytes) {
  MetaKey k;
  k.bytes[31] = 0xFF;
  k.bytes[30] = 0xFF;
  const auto s = key_successor(k);
  EXPECT_EQ(s.bytes[31], 0);
  EXPECT_EQ(s.bytes[30], 0);
  EXPECT_EQ(s.bytes[29], 1);
  MetaKey max;
  max.bytes.fill(0xFF);
  EXPECT_THROW(key_successor(max), Error);
  // The scan end for the top id of a namespace spills into the next tag.
  const auto end = key_successor(encode_key(kNs, ~0ULL));
  EXPECT_LT(encode_key(kNs, ~0ULL), end);
}

TEST(OpKinds, Names) {
  for (auto k : kAllOpKinds) EXPECT_EQ(parse_op_kind(op_kind_name(k)), k);
  EXPECT_EQ(parse_compile_mode("insert_on_miss"), CompileMode::kInsertOnMiss);
  EXPECT_THROW(parse_op_kind("scan"), Error);
}

}  // namespace
}  // namespace kvmeta
