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

#include "kvmeta/analysis.h"

#include <algorithm>
#include <map>

#include "kvmeta/error.h"

namespace kvmeta {

double request_hit_rate(std::span<const BlockId> block_ids, const SeenSet& seen) {
  if (block_ids.empty()) throw Error(ErrorCode::kUndefined, "undefined hit rate: empty request");
  std::vector<BlockId> distinct(block_ids.begin(), block_ids.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const auto hits = std::count_if(distinct.begin(), distinct.end(),
                                  [&](BlockId id) { return seen.contains(id); });
  return static_cast<double>(hits) / static_cast<double>(distinct.size());
}

std::vector<RequestHitRate> request_hit_rates(const Trace& trace) {
  std::vector<RequestHitRate> rates;
  rates.reserve(trace.requests.size());
  SeenSet seen;
  for (std::size_t i = 0; i < trace.requests.size(); ++i) {
    const auto& ids = trace.requests[i].block_ids;
    if (ids.empty()) continue;
    rates.push_back({i, request_hit_rate(ids, seen)});
    // A request's blocks become visible only to later requests.
    seen.insert(ids.begin(), ids.end());
  }
  return rates;
}

HitRateCdf hit_rate_cdf(std::span<const RequestHitRate> rates) {
  if (rates.empty()) {
    throw Error(ErrorCode::kUndefined, "hit-rate CDF undefined: no non-empty requests");
  }
  std::vector<double> sorted;
  sorted.reserve(rates.size());
  for (const auto& r : rates) sorted.push_back(r.hit_rate);
  std::sort(sorted.begin(), sorted.end());

  HitRateCdf cdf;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    cdf.points.push_back({sorted[i], static_cast<double>(i + 1) / n});
  }
  cdf.points.back().cumulative_fraction = 1.0;
  return cdf;
}

HitRateCdf hit_rate_cdf(const Trace& trace) {
  const auto rates = request_hit_rates(trace);
  return hit_rate_cdf(rates);
}

std::vector<Run> segment_runs(std::span<const BlockId> block_ids) {
  std::vector<Run> runs;
  for (std::size_t i = 0; i < block_ids.size(); ++i) {
    if (!runs.empty() && block_ids[i - 1] + 1 == block_ids[i] &&
        block_ids[i - 1] != UINT64_MAX) {
      ++runs.back().length;
    } else {
      runs.push_back({block_ids[i], 1});
    }
  }
  return runs;
}

double sequential_fraction(std::span<const BlockId> block_ids) {
  if (block_ids.empty()) {
    throw Error(ErrorCode::kUndefined, "sequential fraction undefined: empty request");
  }
  std::uint64_t sequential = 0;
  for (const auto& run : segment_runs(block_ids)) {
    if (run.length >= 2) sequential += run.length;
  }
  return static_cast<double>(sequential) / static_cast<double>(block_ids.size());
}

double mean_sequential_fraction(const Trace& trace) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : trace.requests) {
    if (r.block_ids.empty()) continue;
    sum += sequential_fraction(r.block_ids);
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::kUndefined, "no non-empty requests");
  return sum / static_cast<double>(n);
}

namespace {

// Ids at positions that belong to length-1 runs, in positional order.
std::vector<BlockId> nonsequential_ids(std::span<const BlockId> block_ids) {
  std::vector<BlockId> out;
  for (const auto& run : segment_runs(block_ids)) {
    if (run.length == 1) out.push_back(run.start_id);
  }
  return out;
}

// Dichotomizes values about their median; values equal to the median are
// dropped. Exact for the full uint64 range.
std::vector<RunSymbol> dichotomize(std::span<const std::uint64_t> values) {
  std::vector<std::uint64_t> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const std::uint64_t lo = sorted[(n - 1) / 2];
  const std::uint64_t hi = sorted[n / 2];
  const std::uint64_t mid = lo + (hi - lo) / 2;
  const bool half = ((hi - lo) & 1U) != 0;  // median is mid + 0.5

  std::vector<RunSymbol> symbols;
  symbols.reserve(n);
  for (auto v : values) {
    if (half) {
      symbols.push_back(v > mid ? RunSymbol::kA : RunSymbol::kB);
    } else if (v > mid) {
      symbols.push_back(RunSymbol::kA);
    } else if (v < mid) {
      symbols.push_back(RunSymbol::kB);
    }
  }
  return symbols;
}

void test_into(RunsTestReport& report, std::uint64_t key,
               std::span<const std::uint64_t> values) {
  const auto symbols = dichotomize(values);
  try {
    report.entries.push_back({key, runs_test(symbols)});
    ++report.tested;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerate) throw;
    ++report.skipped;
  }
}

}  // namespace

RunsTestReport nonseq_randomness_report(const Trace& trace, std::size_t min_occurrences,
                                        RunsTestMode mode) {
  RunsTestReport report;
  report.mode = mode;

  if (mode == RunsTestMode::kPerKeyGaps) {
    std::map<BlockId, std::vector<std::uint64_t>> ordinals;
    for (std::size_t i = 0; i < trace.requests.size(); ++i) {
      for (BlockId id : nonsequential_ids(trace.requests[i].block_ids)) {
        ordinals[id].push_back(i);
      }
    }
    for (const auto& [id, seen_at] : ordinals) {
      if (seen_at.size() < min_occurrences || seen_at.size() < 2) {
        ++report.skipped;
        continue;
      }
      std::vector<std::uint64_t> gaps;
      gaps.reserve(seen_at.size() - 1);
      for (std::size_t k = 1; k < seen_at.size(); ++k) gaps.push_back(seen_at[k] - seen_at[k - 1]);
      test_into(report, id, gaps);
    }
  } else {
    for (std::size_t i = 0; i < trace.requests.size(); ++i) {
      const auto ids = nonsequential_ids(trace.requests[i].block_ids);
      if (ids.empty()) continue;
      if (ids.size() < min_occurrences) {
        ++report.skipped;
        continue;
      }
      test_into(report, i, ids);
    }
  }

  if (report.tested > 0) {
    const auto random = std::count_if(report.entries.begin(), report.entries.end(),
                                      [](const RunsTestEntry& e) {
                                        return e.stat.p_value > kRandomnessAlpha;
                                      });
    report.fraction_random = static_cast<double>(random) / static_cast<double>(report.tested);
  }
  return report;
}

ReuseTimeline reuse_timeline(const Trace& trace, std::uint64_t bucket_seconds) {
  if (bucket_seconds == 0) throw Error(ErrorCode::kInvalidArgument, "bucket_seconds must be >= 1");
  ReuseTimeline timeline;
  timeline.points.reserve(trace.total_blocks());
  const std::uint64_t width_ms = bucket_seconds * 1000;
  for (const auto& r : trace.requests) {
    const std::uint64_t bucket = r.arrival_ms / width_ms;
    for (BlockId id : r.block_ids) timeline.points.push_back({bucket, id});
  }
  return timeline;
}

}  // namespace kvmeta
