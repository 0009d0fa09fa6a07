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
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace kvmeta {

// Logical KVC block identifier ("hash id" in the published traces). Equal ids
// denote the same block.
using BlockId = std::uint64_t;

struct TraceRequest {
  std::uint64_t arrival_ms = 0;
  std::uint64_t input_len = 0;
  std::uint64_t output_len = 0;
  std::vector<BlockId> block_ids;

  bool operator==(const TraceRequest&) const = default;
};

// An ordered request stream. Requests are sorted by arrival_ms and the first
// request arrives at 0 once loaded through parse_trace.
struct Trace {
  std::vector<TraceRequest> requests;
  std::string label;
  std::uint32_t block_tokens = 512;  // annotation only

  std::size_t total_blocks() const;
};

struct ParseResult {
  Trace trace;
  // Records whose timestamp was lower than the record before them.
  std::size_t out_of_order = 0;
};

// Parses JSON-Lines records {"timestamp","input_length","output_length",
// "hash_ids"}. Requests are stably sorted by timestamp and rebased so the
// earliest arrives at 0. Blank lines are ignored. Throws Error(kParse) naming
// the 1-based line number, or Error(kEmptyTrace) when no records exist.
ParseResult parse_trace(std::istream& in, std::string label = {});
ParseResult parse_trace(std::string_view text, std::string label = {});

// Loads a trace file; names ending in ".gz" are decompressed with zlib. The
// label defaults to the file stem.
ParseResult load_trace(const std::filesystem::path& path);

// Canonical JSON-Lines: fixed field order, no whitespace, one record per line.
std::string serialize_trace(const Trace& trace);
void write_trace(const Trace& trace, const std::filesystem::path& path);

}  // namespace kvmeta
