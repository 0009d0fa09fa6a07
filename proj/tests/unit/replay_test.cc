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

#include <atomic>
#include <chrono>

#include <gtest/gtest.h>

#include "kvmeta/error.h"
#include "kvmeta/meta_index.h"
#include "kvmeta/remote_backend.h"
#include "kvmeta/replay.h"
#include "kvmeta/server.h"
#include "kvmeta/synth.h"
#include "test_support.h"

namespace kvmeta {
namespace {

using testing::fixture;

OpStream compile(const Trace& t, CompileMode mode, std::uint64_t split = 1) {
  CompileOptions o;
  o.mode = mode;
  o.ns = make_namespace("replay");
  o.chunk_split = split;
  return compile_ops(t, o);
}

Trace six() { return load_trace(fixture("six_requests.jsonl")).trace; }

// Forwards to another backend and fails every call once `fail_after`
// operations have been served.
class FlakyBackend : public Backend {
 public:
  FlakyBackend(Backend& inner, std::uint64_t fail_after, ErrorCode code = ErrorCode::kTransport)
      : inner_(inner), fail_after_(fail_after), code_(code) {}
  std::optional<MetaValue> put(const MetaKey& k, MetaValue v) override { return inner_.put(k, v); }
  std::optional<MetaValue> get(const MetaKey& k) override {
    tick();
    return inner_.get(k);
  }
  std::vector<ScanEntry> scan(const MetaKey& s, const MetaKey& e, std::uint32_t m) override {
    tick();
    return inner_.scan(s, e, m);
  }
  bool erase(const MetaKey& k) override { return inner_.erase(k); }
  IndexStats stats() override { return inner_.stats(); }
  std::string describe() const override { return "flaky"; }

 private:
  void tick() {
    if (calls_++ >= fail_after_) throw Error(code_, "injected failure");
  }
  Backend& inner_;
  std::uint64_t fail_after_;
  ErrorCode code_;
  std::atomic<std::uint64_t> calls_{0};
};

// Answers no request at all.
class DownBackend : public Backend {
 public:
  std::optional<MetaValue> put(const MetaKey&, MetaValue) override { down(); }
  std::optional<MetaValue> get(const MetaKey&) override { down(); }
  std::vector<ScanEntry> scan(const MetaKey&, const MetaKey&, std::uint32_t) override { down(); }
  bool erase(const MetaKey&) override { down(); }
  IndexStats stats() override { down(); }
  std::string describe() const override { return "down"; }

 private:
  [[noreturn]] static void down() { throw Error(ErrorCode::kTransport, "down"); }
};

TEST(Replay, EmptyStream) {
  MetaIndex idx;
  const auto log = replay(OpStream{}, idx, {});
  EXPECT_TRUE(log.records.empty());
  EXPECT_EQ(log.ops_total, 0u);
  EXPECT_FALSE(log.aborted);
}

TEST(Replay, SerialRecordsInCompilationOrder) {
  MetaIndex idx;
  const auto stream = compile(six(), CompileMode::kInsertOnMiss);
  const auto log = replay(stream, idx, {});
  ASSERT_EQ(log.records.size(), stream.ops.size());
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    EXPECT_EQ(log.records[i].op_index, i);
    EXPECT_EQ(log.records[i].kind, stream.ops[i].kind);
    EXPECT_EQ(log.records[i].issue_ms, stream.ops[i].issue_ms);
    EXPECT_EQ(log.records[i].outcome, Outcome::kOk) << i;
  }
}

TEST(Replay, PreloadHasNoMissesAndFullScans) {
  const auto trace = generate(SynthConfig{});
  for (std::uint64_t split : {1, 3}) {
    MetaIndex idx;
    const auto stream = compile(trace, CompileMode::kPreload, split);
    ReplayOptions o;
    o.workers = 3;
    const auto log = replay(stream, idx, o);
    ASSERT_EQ(log.records.size(), stream.ops.size());
    for (const auto& r : log.records) {
      ASSERT_EQ(r.outcome, Outcome::kOk);
      ASSERT_EQ(r.result_count, stream.ops[r.op_index].span);
    }
    EXPECT_EQ(idx.size(), stream.preload.size());
  }
}

TEST(Replay, MissesAreDetected) {
  MetaIndex idx;
  auto stream = compile(six(), CompileMode::kPreload);
  stream.preload.erase(stream.preload.begin());  // drop id 1
  const auto log = replay(stream, idx, {});
  // Request 0 and 1 scan [1,4) and request 5 scans [1,3): all short.
  std::size_t misses = 0;
  for (const auto& r : log.records) misses += r.outcome == Outcome::kMiss;
  EXPECT_EQ(misses, 3u);
}

TEST(Replay, FaithfulScheduleScalesTime) {
  OpStream stream;
  const auto ns = make_namespace("f");
  for (std::uint64_t i = 0; i <= 10; ++i) {
    MetadataOp op;
    op.key = encode_key(ns, i);
    op.issue_ms = i * 360000;  // one hour end to end
    stream.ops.push_back(op);
  }
  MetaIndex idx;
  ReplayOptions o;
  o.schedule = Schedule::kFaithful;
  o.time_scale = 0.0001;  // 0.36 s of schedule
  const auto t0 = std::chrono::steady_clock::now();
  const auto log = replay(stream, idx, o);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GE(elapsed, 0.35);
  EXPECT_LT(elapsed, 2.0);
  ASSERT_EQ(log.records.size(), 11u);
  for (const auto& r : log.records) {
    EXPECT_EQ(r.outcome, Outcome::kMiss);
    EXPECT_GE(r.sched_lag_ns, 0);
  }
}

TEST(Replay, ErrorsAreRecordedNotMissesAndAbort) {
  MetaIndex idx;
  FlakyBackend flaky(idx, 150);
  const auto trace = generate(SynthConfig{});
  const auto stream = compile(trace, CompileMode::kPreload);
  ASSERT_GT(stream.ops.size(), 400u);
  const auto log = replay(stream, flaky, {});
  EXPECT_TRUE(log.aborted);
  EXPECT_LT(log.records.size(), stream.ops.size());
  EXPECT_EQ(log.ops_total, stream.ops.size());
  std::size_t errors = 0;
  for (const auto& r : log.records) {
    if (r.op_index >= 150) {
      EXPECT_EQ(r.outcome, Outcome::kError);
      ASSERT_TRUE(r.error.has_value());
      EXPECT_EQ(*r.error, ErrorCode::kTransport);
    } else {
      EXPECT_EQ(r.outcome, Outcome::kOk);
    }
    errors += r.outcome == Outcome::kError;
  }
  EXPECT_EQ(errors, log.errors);
  EXPECT_GE(errors, 1u);
}

TEST(Replay, ErrorsBelowThresholdDoNotAbort) {
  MetaIndex idx;
  const auto trace = generate(SynthConfig{});
  const auto stream = compile(trace, CompileMode::kPreload);
  FlakyBackend flaky(idx, stream.ops.size() - 1);  // only the last op fails
  const auto log = replay(stream, flaky, {});
  EXPECT_FALSE(log.aborted);
  EXPECT_EQ(log.errors, 1u);
  EXPECT_EQ(log.records.size(), stream.ops.size());
}

TEST(Replay, UnavailableBackend) {
  DownBackend down;
  try {
    replay(compile(six(), CompileMode::kPreload), down, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnavailable);
  }
}

// Stops the server after a fixed number of reads, as if it died mid-run.
class StopAfter : public Backend {
 public:
  StopAfter(Backend& inner, Server& server, std::uint64_t n) : inner_(inner), server_(server), n_(n) {}
  std::optional<MetaValue> put(const MetaKey& k, MetaValue v) override { return inner_.put(k, v); }
  std::optional<MetaValue> get(const MetaKey& k) override {
    maybe_stop();
    return inner_.get(k);
  }
  std::vector<ScanEntry> scan(const MetaKey& s, const MetaKey& e, std::uint32_t m) override {
    maybe_stop();
    return inner_.scan(s, e, m);
  }
  bool erase(const MetaKey& k) override { return inner_.erase(k); }
  IndexStats stats() override { return inner_.stats(); }
  std::string describe() const override { return inner_.describe(); }

 private:
  void maybe_stop() {
    if (calls_++ == n_) server_.stop();
  }
  Backend& inner_;
  Server& server_;
  std::uint64_t n_;
  std::uint64_t calls_ = 0;
};

TEST(Replay, ServerStoppedMidRunYieldsTransportErrors) {
  MetaIndex idx;
  auto server = serve(net::parse_endpoint("127.0.0.1:0"), idx);
  RemoteBackend remote(server->endpoint(), RemoteOptions{std::chrono::milliseconds(500)});
  StopAfter backend(remote, *server, 50);
  const auto stream = compile(generate(SynthConfig{}), CompileMode::kPreload);
  const auto log = replay(stream, backend, {});
  EXPECT_TRUE(log.aborted);
  for (const auto& r : log.records) {
    if (r.op_index < 50) {
      EXPECT_EQ(r.outcome, Outcome::kOk);
    } else {
      EXPECT_EQ(r.outcome, Outcome::kError) << r.op_index;
      ASSERT_TRUE(r.error.has_value());
      EXPECT_TRUE(Error(*r.error, "").is_transport());
    }
  }
}

TEST(Replay, Names) {
  EXPECT_EQ(parse_schedule("closed"), Schedule::kClosedLoop);
  EXPECT_EQ(parse_schedule("faithful"), Schedule::kFaithful);
  EXPECT_EQ(parse_outcome(outcome_name(Outcome::kMiss)), Outcome::kMiss);
  EXPECT_THROW(parse_schedule("open"), Error);
}

}  // namespace
}  // namespace kvmeta
