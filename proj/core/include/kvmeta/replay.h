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
#include <string_view>
#include <vector>

#include "kvmeta/backend.h"
#include "kvmeta/error.h"
#include "kvmeta/op_compiler.h"

namespace kvmeta {

enum class Outcome : std::uint8_t { kOk, kMiss, kError };

std::string_view outcome_name(Outcome outcome);
Outcome parse_outcome(std::string_view name);

struct LatencyRecord {
  OpKind kind = OpKind::kPointGet;
  std::uint64_t issue_ms = 0;
  std::uint64_t latency_ns = 0;  // around the backend call only
  Outcome outcome = Outcome::kOk;
  std::optional<ErrorCode> error;
  std::int64_t sched_lag_ns = 0;  // dispatch time minus scheduled time
  std::uint32_t result_count = 0; // scan entries returned; 1/0 for get hit/miss
  std::uint64_t op_index = 0;
};

struct LatencyLog {
  std::vector<LatencyRecord> records;  // in op order
  bool aborted = false;
  std::uint64_t errors = 0;
  std::uint64_t ops_total = 0;  // ops in the stream, dispatched or not
};

enum class Schedule {
  kFaithful,    // dispatch at issue_ms * time_scale after start
  kClosedLoop,  // ignore issue times, keep `workers` ops in flight
};

std::string_view schedule_name(Schedule schedule);
Schedule parse_schedule(std::string_view name);

struct ReplayOptions {
  Schedule schedule = Schedule::kClosedLoop;
  double time_scale = 1.0;
  std::size_t workers = 1;
  double abort_error_rate = 0.01;
  // Error rate is not judged before this many ops have completed.
  std::uint64_t abort_min_ops = 100;
};

// Replays the stream against a backend. The preload is installed untimed.
// Each dispatched op yields one record. A get is a miss when absent; a scan is
// a miss when it returns fewer entries than its span. Per-op errors are
// recorded; once the error rate exceeds abort_error_rate dispatch stops and
// the log is marked aborted.
//
// Throws Error(kUnavailable) if the backend cannot answer a stats() probe
// before replay starts, or any error raised while preloading.
LatencyLog replay(const OpStream& stream, Backend& backend, const ReplayOptions& options);

}  // namespace kvmeta
