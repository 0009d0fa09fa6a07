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
#include <span>
#include <unordered_set>
#include <vector>

#include "kvmeta/runs_test.h"
#include "kvmeta/trace.h"

namespace kvmeta {

// Blocks produced by fully processed earlier requests.
using SeenSet = std::unordered_set<BlockId>;

struct CdfPoint {
  double hit_rate = 0.0;
  double cumulative_fraction = 0.0;
};

struct HitRateCdf {
  std::vector<CdfPoint> points;
};

// Maximal positional stretch whose ids increase by exactly one.
struct Run {
  BlockId start_id = 0;
  std::uint64_t length = 0;

  bool operator==(const Run&) const = default;
};

enum class RunsTestMode { kPerKeyGaps, kPerRequestMedian };

struct RunsTestEntry {
  std::uint64_t key = 0;  // block id or request index, depending on mode
  RunsTestStat stat;
};

struct RunsTestReport {
  RunsTestMode mode = RunsTestMode::kPerKeyGaps;
  std::vector<RunsTestEntry> entries;  // sorted by key
  std::optional<double> fraction_random;  // empty when nothing was testable
  std::uint64_t tested = 0;
  std::uint64_t skipped = 0;
};

struct TimelinePoint {
  std::uint64_t bucket = 0;
  BlockId block_id = 0;
};

struct ReuseTimeline {
  std::vector<TimelinePoint> points;
};

struct RequestHitRate {
  std::size_t request_index = 0;
  double hit_rate = 0.0;
};

inline constexpr double kRandomnessAlpha = 0.05;

// Fraction of the request's distinct ids already in `seen`. Throws
// Error(kUndefined) for an empty request.
double request_hit_rate(std::span<const BlockId> block_ids, const SeenSet& seen);

// Hit rate of every non-empty request against the blocks of all requests
// before it, in trace order.
std::vector<RequestHitRate> request_hit_rates(const Trace& trace);

// Empirical CDF of request_hit_rates. Throws Error(kUndefined) when the trace
// has no non-empty request.
HitRateCdf hit_rate_cdf(const Trace& trace);
HitRateCdf hit_rate_cdf(std::span<const RequestHitRate> rates);

std::vector<Run> segment_runs(std::span<const BlockId> block_ids);

// Share of blocks that sit in runs of length two or more. Throws
// Error(kUndefined) for an empty request.
double sequential_fraction(std::span<const BlockId> block_ids);

// Mean sequential_fraction over non-empty requests.
double mean_sequential_fraction(const Trace& trace);

RunsTestReport nonseq_randomness_report(const Trace& trace,
                                        std::size_t min_occurrences = 8,
                                        RunsTestMode mode = RunsTestMode::kPerKeyGaps);

ReuseTimeline reuse_timeline(const Trace& trace, std::uint64_t bucket_seconds = 60);

}  // namespace kvmeta
