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

#include "kvmeta/replay.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

namespace kvmeta {

std::string_view outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::kOk: return "ok";
    case Outcome::kMiss: return "miss";
    case Outcome::kError: return "error";
  }
  return "unknown";
}

Outcome parse_outcome(std::string_view name) {
  if (name == "ok") return Outcome::kOk;
  if (name == "miss") return Outcome::kMiss;
  if (name == "error") return Outcome::kError;
  throw Error(ErrorCode::kInvalidArgument, "unknown outcome '" + std::string(name) + "'");
}

std::string_view schedule_name(Schedule schedule) {
  return schedule == Schedule::kFaithful ? "faithful" : "closed_loop";
}

Schedule parse_schedule(std::string_view name) {
  if (name == "faithful") return Schedule::kFaithful;
  if (name == "closed_loop" || name == "closed") return Schedule::kClosedLoop;
  throw Error(ErrorCode::kInvalidArgument, "unknown schedule '" + std::string(name) + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

void execute(const MetadataOp& op, Backend& backend, LatencyRecord& rec) {
  const auto t0 = Clock::now();
  try {
    switch (op.kind) {
      case OpKind::kPointGet: {
        const auto v = backend.get(op.key);
        rec.result_count = v ? 1 : 0;
        rec.outcome = v ? Outcome::kOk : Outcome::kMiss;
        break;
      }
      case OpKind::kRangeScan: {
        const auto entries = backend.scan(op.key, op.end_exclusive, op.span);
        rec.result_count = static_cast<std::uint32_t>(entries.size());
        rec.outcome = entries.size() == op.span ? Outcome::kOk : Outcome::kMiss;
        break;
      }
      case OpKind::kInsert:
        backend.put(op.key, op.value);
        rec.result_count = 1;
        rec.outcome = Outcome::kOk;
        break;
    }
  } catch (const Error& e) {
    rec.outcome = Outcome::kError;
    rec.error = e.code();
  } catch (const std::exception&) {
    rec.outcome = Outcome::kError;
    rec.error = ErrorCode::kBackend;
  }
  const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
  rec.latency_ns = ns > 0 ? static_cast<std::uint64_t>(ns) : 1;
}

}  // namespace

LatencyLog replay(const OpStream& stream, Backend& backend, const ReplayOptions& options) {
  if (options.workers == 0) throw Error(ErrorCode::kInvalidArgument, "workers must be >= 1");
  if (!(options.time_scale >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "time_scale must be >= 0");

  try {
    backend.stats();
  } catch (const Error& e) {
    throw Error(ErrorCode::kUnavailable, "backend unavailable: " + std::string(e.what()));
  }
  for (const auto& entry : stream.preload) backend.put(entry.key, entry.value);

  LatencyLog log;
  log.ops_total = stream.ops.size();
  if (stream.ops.empty()) return log;

  std::atomic<std::size_t> next{0};
  std::atomic<std::uint64_t> completed{0};
  std::atomic<std::uint64_t> errors{0};
  std::atomic<bool> abort{false};
  const auto start = Clock::now();

  auto worker = [&](std::vector<LatencyRecord>& out) {
    while (!abort.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= stream.ops.size()) break;
      const MetadataOp& op = stream.ops[i];

      LatencyRecord rec;
      rec.kind = op.kind;
      rec.issue_ms = op.issue_ms;
      rec.op_index = i;
      if (options.schedule == Schedule::kFaithful) {
        const auto due = start + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double, std::milli>(
                                         static_cast<double>(op.issue_ms) * options.time_scale));
        std::this_thread::sleep_until(due);
        rec.sched_lag_ns =
            std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - due).count();
      }
      execute(op, backend, rec);
      out.push_back(rec);

      const auto done = completed.fetch_add(1, std::memory_order_relaxed) + 1;
      if (rec.outcome == Outcome::kError) {
        const auto errs = errors.fetch_add(1, std::memory_order_relaxed) + 1;
        if (done >= options.abort_min_ops &&
            static_cast<double>(errs) > options.abort_error_rate * static_cast<double>(done)) {
          abort.store(true);
        }
      }
    }
  };

  std::vector<std::vector<LatencyRecord>> buffers(options.workers);
  if (options.workers == 1) {
    buffers[0].reserve(stream.ops.size());
    worker(buffers[0]);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(options.workers);
    for (auto& buf : buffers) threads.emplace_back(worker, std::ref(buf));
    for (auto& t : threads) t.join();
  }

  // The abort check above only runs on errors; judge the final tally too so
  // short runs dominated by errors are flagged.
  const auto errs = errors.load();
  const auto done = completed.load();
  if (!abort.load() && done > 0 &&
      static_cast<double>(errs) > options.abort_error_rate * static_cast<double>(done) &&
      done >= std::min<std::uint64_t>(options.abort_min_ops, stream.ops.size())) {
    abort.store(true);
  }

  for (auto& buf : buffers) {
    log.records.insert(log.records.end(), buf.begin(), buf.end());
  }
  std::sort(log.records.begin(), log.records.end(),
            [](const LatencyRecord& a, const LatencyRecord& b) { return a.op_index < b.op_index; });
  log.aborted = abort.load();
  log.errors = errs;
  return log;
}

}  // namespace kvmeta
