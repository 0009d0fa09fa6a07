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
#include <iosfwd>
#include <span>
#include <vector>

#include "kvmeta/op_compiler.h"
#include "kvmeta/replay.h"

namespace kvmeta {

// Nearest-rank percentile: the ceil(q * n)-th smallest sample (1-based).
// Throws Error(kInvalidArgument) for empty samples or q outside (0, 1].
template <typename T>
T percentile(std::span<const T> samples, double q);

extern template std::uint64_t percentile<std::uint64_t>(std::span<const std::uint64_t>, double);
extern template double percentile<double>(std::span<const double>, double);

inline std::uint64_t percentile(const std::vector<std::uint64_t>& samples, double q) {
  return percentile<std::uint64_t>(std::span<const std::uint64_t>(samples), q);
}
inline double percentile(const std::vector<double>& samples, double q) {
  return percentile<double>(std::span<const double>(samples), q);
}

struct IntervalCell {
  std::uint64_t interval_index = 0;
  OpKind kind = OpKind::kPointGet;
  std::uint64_t count = 0;   // non-error records
  std::uint64_t errors = 0;
  std::uint64_t p50_ns = 0;
  std::uint64_t p99_ns = 0;

  bool operator==(const IntervalCell&) const = default;
};

struct IntervalStats {
  // Sorted by (interval_index, kind). Cells without a single non-error record
  // are omitted; their errors are counted in error_only.
  std::vector<IntervalCell> cells;
  std::uint64_t error_only = 0;
};

// Buckets records issued at or after warmup_s into interval_s windows of
// trace time: [i*L, (i+1)*L).
IntervalStats interval_stats(const LatencyLog& log, std::uint64_t interval_s = 60,
                             std::uint64_t warmup_s = 600);

struct NormalizedCell {
  std::uint64_t interval_index = 0;
  OpKind kind = OpKind::kPointGet;
  double ratio = 0.0;
  bool defined = true;  // false when the baseline p99 is 0
};

struct NormalizedReport {
  std::vector<NormalizedCell> cells;
  // Mean ratio over defined cells, per op kind present.
  std::vector<std::pair<OpKind, double>> mean_ratio;
};

// p99 ratios over the cells both inputs share. Throws Error(kInvalidArgument)
// when they share none.
NormalizedReport normalize(const IntervalStats& stats, const IntervalStats& baseline);

// CSV files, headers exactly:
//   latency_log.csv    op_kind,issue_ms,latency_ns,outcome
//   interval_stats.csv interval_index,op_kind,count,p50_ns,p99_ns
//   normalized.csv     interval_index,op_kind,ratio
void write_latency_log_csv(std::ostream& out, const LatencyLog& log);
void write_interval_stats_csv(std::ostream& out, const IntervalStats& stats);
void write_normalized_csv(std::ostream& out, const NormalizedReport& report);
IntervalStats read_interval_stats_csv(std::istream& in);
LatencyLog read_latency_log_csv(std::istream& in);

}  // namespace kvmeta
