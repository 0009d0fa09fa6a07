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

#include <zlib.h>

#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "kvmeta/error.h"
#include "kvmeta/trace.h"
#include "test_support.h"

namespace kvmeta {
namespace {

using testing::fixture;
using testing::scratch_dir;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode parse_error_code(std::string_view text) {
  try {
    parse_trace(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a parse failure for: " << text;
  return ErrorCode::kInvalidArgument;
}

TEST(TraceParse, SingleRecord) {
  const auto r = parse_trace(
      R"({"timestamp":0,"input_length":2048,"output_length":128,"hash_ids":[1,2,3,4]})");
  ASSERT_EQ(r.trace.requests.size(), 1u);
  const auto& req = r.trace.requests[0];
  EXPECT_EQ(req.arrival_ms, 0u);
  EXPECT_EQ(req.input_len, 2048u);
  EXPECT_EQ(req.output_len, 128u);
  EXPECT_EQ(req.block_ids, (std::vector<BlockId>{1, 2, 3, 4}));
  EXPECT_EQ(r.out_of_order, 0u);
}

TEST(TraceParse, EmptyHashIdsAccepted) {
  const auto r = parse_trace(R"({"timestamp":7,"input_length":0,"output_length":1,"hash_ids":[]})");
  ASSERT_EQ(r.trace.requests.size(), 1u);
  EXPECT_TRUE(r.trace.requests[0].block_ids.empty());
}

TEST(TraceParse, SortsAndRebases) {
  const auto r = load_trace(fixture("three_requests.jsonl"));
  EXPECT_EQ(r.out_of_order, 1u);
  EXPECT_EQ(r.trace.label, "three_requests");
  ASSERT_EQ(r.trace.requests.size(), 3u);
  EXPECT_EQ(r.trace.requests[0].arrival_ms, 0u);
  EXPECT_EQ(r.trace.requests[1].arrival_ms, 2000u);
  EXPECT_EQ(r.trace.requests[2].arrival_ms, 6500u);
  EXPECT_EQ(r.trace.total_blocks(), 7u);
}

TEST(TraceParse, StableForEqualTimestamps) {
  const auto r = parse_trace(
      "{\"timestamp\":5,\"input_length\":1,\"output_length\":1,\"hash_ids\":[1]}\n"
      "{\"timestamp\":5,\"input_length\":2,\"output_length\":1,\"hash_ids\":[2]}\n"
      "{\"timestamp\":4,\"input_length\":3,\"output_length\":1,\"hash_ids\":[3]}\n");
  ASSERT_EQ(r.trace.requests.size(), 3u);
  EXPECT_EQ(r.trace.requests[0].input_len, 3u);
  EXPECT_EQ(r.trace.requests[1].input_len, 1u);
  EXPECT_EQ(r.trace.requests[2].input_len, 2u);
}

TEST(TraceParse, Errors) {
  EXPECT_EQ(parse_error_code(""), ErrorCode::kEmptyTrace);
  EXPECT_EQ(parse_error_code("\n\n"), ErrorCode::kEmptyTrace);
  EXPECT_EQ(parse_error_code("{not json"), ErrorCode::kParse);
  EXPECT_EQ(parse_error_code(R"({"timestamp":0,"input_length":1,"output_length":1})"),
            ErrorCode::kParse);
  EXPECT_EQ(parse_error_code(R"({"timestamp":-1,"input_length":1,"output_length":1,"hash_ids":[]})"),
            ErrorCode::kParse);
  EXPECT_EQ(parse_error_code(R"({"timestamp":0,"input_length":1,"output_length":1,"hash_ids":[1.5]})"),
            ErrorCode::kParse);
  EXPECT_EQ(parse_error_code(R"({"timestamp":0,"input_length":1,"output_length":1,"hash_ids":["7"]})"),
            ErrorCode::kParse);
  EXPECT_EQ(parse_error_code(R"({"timestamp":0,"input_length":1,"output_length":1,"hash_ids":[-3]})"),
            ErrorCode::kParse);
}

TEST(TraceParse, EmptyTraceMessage) {
  try {
    parse_trace("");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "empty trace");
  }
}

TEST(TraceParse, ErrorNamesLine) {
  try {
    parse_trace(
        "{\"timestamp\":0,\"input_length\":1,\"output_length\":1,\"hash_ids\":[1]}\n"
        "\n"
        "{\"timestamp\":1,\"input_length\":1}\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(TraceSerialize, EmptyTraceIsEmptyOutput) { EXPECT_EQ(serialize_trace(Trace{}), ""); }

TEST(TraceSerialize, GoldenFile) {
  const auto r = load_trace(fixture("three_requests.jsonl"));
  EXPECT_EQ(serialize_trace(r.trace), read_file(fixture("golden/three_requests.canonical.jsonl")));
}

Trace random_trace(std::mt19937_64& rng) {
  Trace t;
  const auto n = std::uniform_int_distribution<int>(1, 20)(rng);
  std::uint64_t clock = 0;
  for (int i = 0; i < n; ++i) {
    TraceRequest r;
    clock += std::uniform_int_distribution<std::uint64_t>(0, 5000)(rng);
    r.arrival_ms = clock;
    r.input_len = rng() >> 40;
    r.output_len = rng() >> 50;
    const auto blocks = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int b = 0; b < blocks; ++b) r.block_ids.push_back(rng() >> std::uniform_int_distribution<int>(0, 60)(rng));
    t.requests.push_back(std::move(r));
  }
  // Parsed traces always start at 0.
  const auto base = t.requests.front().arrival_ms;
  for (auto& r : t.requests) r.arrival_ms -= base;
  return t;
}

TEST(TraceSerialize, RoundTripProperty) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const Trace t = random_trace(rng);
    const auto back = parse_trace(serialize_trace(t));
    EXPECT_EQ(back.trace.requests, t.requests);
    EXPECT_EQ(back.out_of_order, 0u);
  }
}

TEST(TraceSerialize, Injective) {
  Trace a, b;
  a.requests.push_back({0, 1, 1, {1, 23}});
  b.requests.push_back({0, 1, 1, {12, 3}});
  EXPECT_NE(serialize_trace(a), serialize_trace(b));
  Trace c;
  c.requests.push_back({0, 1, 1, {1}});
  c.requests.push_back({0, 1, 1, {23}});
  EXPECT_NE(serialize_trace(a), serialize_trace(c));
}

TEST(TraceLoad, GzipInput) {
  const auto dir = scratch_dir("trace_gz");
  const auto plain = read_file(fixture("three_requests.jsonl"));
  const auto gz_path = dir / "three.jsonl.gz";
  gzFile gz = gzopen(gz_path.c_str(), "wb");
  ASSERT_NE(gz, nullptr);
  ASSERT_EQ(gzwrite(gz, plain.data(), static_cast<unsigned>(plain.size())), static_cast<int>(plain.size()));
  gzclose(gz);

  const auto from_gz = load_trace(gz_path);
  const auto from_plain = load_trace(fixture("three_requests.jsonl"));
  EXPECT_EQ(from_gz.trace.requests, from_plain.trace.requests);
  EXPECT_EQ(from_gz.trace.label, "three");
}

TEST(TraceLoad, MissingFile) {
  EXPECT_THROW(load_trace("/nonexistent/trace.jsonl"), Error);
}

TEST(TraceLoad, WriteThenLoad) {
  const auto dir = scratch_dir("trace_write");
  const auto r = load_trace(fixture("six_requests.jsonl"));
  write_trace(r.trace, dir / "copy.jsonl");
  EXPECT_EQ(load_trace(dir / "copy.jsonl").trace.requests, r.trace.requests);
}

}  // namespace
}  // namespace kvmeta
