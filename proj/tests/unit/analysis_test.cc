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

#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "analysis_io.h"
#include "kvmeta/analysis.h"
#include "kvmeta/error.h"
#include "test_support.h"

namespace kvmeta {
namespace {

using testing::fixture;

Trace six_requests() { return load_trace(fixture("six_requests.jsonl")).trace; }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TraceRequest req(std::uint64_t t, std::vector<BlockId> ids) {
  TraceRequest r;
  r.arrival_ms = t;
  r.block_ids = std::move(ids);
  return r;
}

TEST(HitRate, Examples) {
  const std::vector<BlockId> ids{10, 11, 12};
  EXPECT_EQ(request_hit_rate(ids, {}), 0.0);
  EXPECT_EQ(request_hit_rate(ids, {10, 11, 12}), 1.0);
  const std::vector<BlockId> partial{1, 2, 9};
  EXPECT_DOUBLE_EQ(request_hit_rate(partial, {1, 9}), 2.0 / 3.0);
}

TEST(HitRate, EmptyRequestUndefined) {
  try {
    request_hit_rate({}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefined);
  }
}

TEST(HitRate, DuplicatesWithinRequestCountOnce) {
  // The second 4 was produced by this request, not an earlier one.
  const std::vector<BlockId> ids{4, 4, 5};
  EXPECT_EQ(request_hit_rate(ids, {}), 0.0);
  EXPECT_DOUBLE_EQ(request_hit_rate(ids, {4}), 0.5);
}

TEST(HitRate, SixRequestFixture) {
  const auto rates = request_hit_rates(six_requests());
  ASSERT_EQ(rates.size(), 6u);
  const double expected[] = {0.0, 1.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0, 1.0};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(rates[i].request_index, i);
    EXPECT_DOUBLE_EQ(rates[i].hit_rate, expected[i]) << "request " << i;
  }
}

TEST(HitRateCdf, TwoIdenticalRequests) {
  Trace t;
  t.requests = {req(0, {1, 2}), req(10, {1, 2})};
  const auto cdf = hit_rate_cdf(t);
  ASSERT_EQ(cdf.points.size(), 2u);
  EXPECT_EQ(cdf.points[0].hit_rate, 0.0);
  EXPECT_EQ(cdf.points[0].cumulative_fraction, 0.5);
  EXPECT_EQ(cdf.points[1].hit_rate, 1.0);
  EXPECT_EQ(cdf.points[1].cumulative_fraction, 1.0);
}

TEST(HitRateCdf, DisjointRequestsSingleStep) {
  Trace t;
  t.requests = {req(0, {1}), req(1, {2, 3}), req(2, {}), req(3, {4})};
  const auto cdf = hit_rate_cdf(t);
  ASSERT_EQ(cdf.points.size(), 1u);
  EXPECT_EQ(cdf.points[0].hit_rate, 0.0);
  EXPECT_EQ(cdf.points[0].cumulative_fraction, 1.0);
}

TEST(HitRateCdf, NoNonEmptyRequest) {
  Trace t;
  t.requests = {req(0, {})};
  EXPECT_THROW(hit_rate_cdf(t), Error);
}

TEST(HitRateCdf, GoldenCsv) {
  std::ostringstream out;
  cli::write_hit_rate_cdf_csv(out, hit_rate_cdf(six_requests()));
  EXPECT_EQ(out.str(), read_file(fixture("golden/six_requests.hit_rate_cdf.csv")));
  std::istringstream in(out.str());
  const auto back = cli::read_hit_rate_cdf_csv(in);
  const auto orig = hit_rate_cdf(six_requests());
  ASSERT_EQ(back.points.size(), orig.points.size());
  for (std::size_t i = 0; i < back.points.size(); ++i) {
    EXPECT_EQ(back.points[i].hit_rate, orig.points[i].hit_rate);
    EXPECT_EQ(back.points[i].cumulative_fraction, orig.points[i].cumulative_fraction);
  }
}

TEST(SegmentRuns, Examples) {
  const std::vector<BlockId> mixed{5, 6, 7, 42, 9, 10};
  EXPECT_EQ(segment_runs(mixed), (std::vector<kvmeta::Run>{{5, 3}, {42, 1}, {9, 2}}));
  EXPECT_TRUE(segment_runs({}).empty());
  const std::vector<BlockId> desc{8, 7, 6};
  EXPECT_EQ(segment_runs(desc), (std::vector<kvmeta::Run>{{8, 1}, {7, 1}, {6, 1}}));
  const std::vector<BlockId> repeat{3, 3, 4};
  EXPECT_EQ(segment_runs(repeat), (std::vector<kvmeta::Run>{{3, 1}, {3, 2}}));
}

TEST(SegmentRuns, MaxIdDoesNotWrap) {
  const BlockId max = std::numeric_limits<BlockId>::max();
  const std::vector<BlockId> ids{max - 1, max, 0, 1};
  EXPECT_EQ(segment_runs(ids), (std::vector<kvmeta::Run>{{max - 1, 2}, {0, 2}}));
}

TEST(SequentialFraction, Examples) {
  const std::vector<BlockId> mixed{5, 6, 7, 42, 9, 10};
  EXPECT_DOUBLE_EQ(sequential_fraction(mixed), 5.0 / 6.0);
  const std::vector<BlockId> full{1, 2, 3, 4};
  EXPECT_EQ(sequential_fraction(full), 1.0);
  const std::vector<BlockId> none{3, 9, 27};
  EXPECT_EQ(sequential_fraction(none), 0.0);
  EXPECT_THROW(sequential_fraction({}), Error);
}

TEST(SequentialFraction, SixRequestFixture) {
  const Trace t = six_requests();
  const double expected[] = {0.75, 0.75, 5.0 / 6.0, 0.0, 1.0, 2.0 / 3.0};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_DOUBLE_EQ(sequential_fraction(t.requests[i].block_ids), expected[i]) << i;
  }
  EXPECT_DOUBLE_EQ(mean_sequential_fraction(t), 4.0 / 6.0);
  std::ostringstream out;
  cli::write_seq_fraction_csv(out, t);
  EXPECT_EQ(out.str(), read_file(fixture("golden/six_requests.seq_fraction.csv")));
}

TEST(ReuseTimeline, Examples) {
  Trace one;
  one.requests = {req(0, {1, 2})};
  const auto tl = reuse_timeline(one);
  ASSERT_EQ(tl.points.size(), 2u);
  EXPECT_EQ(tl.points[0].bucket, 0u);
  EXPECT_EQ(tl.points[0].block_id, 1u);
  EXPECT_EQ(tl.points[1].block_id, 2u);

  Trace late;
  late.requests = {req(61000, {5})};
  EXPECT_EQ(reuse_timeline(late, 60).points[0].bucket, 1u);
  EXPECT_THROW(reuse_timeline(late, 0), Error);
}

TEST(ReuseTimeline, GoldenCsv) {
  std::ostringstream out;
  cli::write_reuse_timeline_csv(out, reuse_timeline(six_requests(), 60));
  EXPECT_EQ(out.str(), read_file(fixture("golden/six_requests.reuse_timeline.csv")));
}

// Id 1000 occurs as an isolated block at request ordinals whose gaps are
// 1,5,1,5,1,5,1,5; every other id occurs once.
Trace alternating_gap_trace() {
  Trace t;
  std::vector<std::uint64_t> at{0};
  for (int i = 0; i < 8; ++i) at.push_back(at.back() + (i % 2 == 0 ? 1 : 5));
  std::uint64_t filler = 50000;
  for (std::uint64_t ord = 0; ord <= at.back(); ++ord) {
    const bool has = std::find(at.begin(), at.end(), ord) != at.end();
    if (has) {
      t.requests.push_back(req(ord * 1000, {1000, filler}));
    } else {
      t.requests.push_back(req(ord * 1000, {filler}));
    }
    filler += 2;
  }
  return t;
}

TEST(RandomnessReport, AlternatingGapsAreNonRandom) {
  const auto report = nonseq_randomness_report(alternating_gap_trace(), 8, RunsTestMode::kPerKeyGaps);
  EXPECT_EQ(report.tested, 1u);
  ASSERT_EQ(report.entries.size(), 1u);
  EXPECT_EQ(report.entries[0].key, 1000u);
  const auto& s = report.entries[0].stat;
  EXPECT_EQ(s.n1, 4u);
  EXPECT_EQ(s.n2, 4u);
  EXPECT_EQ(s.runs, 8u);
  // statsmodels runstest_1samp(correction=False) on [1,5,1,5,1,5,1,5].
  EXPECT_NEAR(s.z, 2.2912878474779204, 1e-12);
  EXPECT_NEAR(s.p_value, 0.021946771003246834, 1e-9);
  EXPECT_LT(s.p_value, kRandomnessAlpha);
  ASSERT_TRUE(report.fraction_random.has_value());
  EXPECT_EQ(*report.fraction_random, 0.0);
}

TEST(RandomnessReport, ConstantGapsAllTieAndSkip) {
  Trace t;
  for (std::uint64_t i = 0; i < 12; ++i) t.requests.push_back(req(i, {77}));
  const auto report = nonseq_randomness_report(t, 8, RunsTestMode::kPerKeyGaps);
  EXPECT_EQ(report.tested, 0u);
  EXPECT_EQ(report.skipped, 1u);
  EXPECT_FALSE(report.fraction_random.has_value());
}

TEST(RandomnessReport, SequentialBlocksExcluded) {
  // 77 always sits inside a run, so it never contributes.
  Trace t;
  for (std::uint64_t i = 0; i < 12; ++i) t.requests.push_back(req(i, {76, 77}));
  const auto report = nonseq_randomness_report(t, 8, RunsTestMode::kPerKeyGaps);
  EXPECT_EQ(report.tested, 0u);
  EXPECT_EQ(report.skipped, 0u);
}

TEST(RandomnessReport, PerRequestMedianMode) {
  Trace t;
  // Isolated ids alternate above/below the median: 10 values, R = 10.
  t.requests.push_back(req(0, {2, 100, 4, 102, 6, 104, 8, 106, 10, 108}));
  t.requests.push_back(req(1, {1, 3}));
  const auto report = nonseq_randomness_report(t, 8, RunsTestMode::kPerRequestMedian);
  EXPECT_EQ(report.tested, 1u);
  EXPECT_EQ(report.skipped, 1u);
  ASSERT_EQ(report.entries.size(), 1u);
  EXPECT_EQ(report.entries[0].key, 0u);
  EXPECT_EQ(report.entries[0].stat.runs, 10u);
  EXPECT_NEAR(report.entries[0].stat.p_value, 0.007290358091535638, 1e-9);
}

TEST(RandomnessReport, FewOccurrencesSkipped) {
  const auto report = nonseq_randomness_report(six_requests(), 8, RunsTestMode::kPerKeyGaps);
  EXPECT_EQ(report.tested, 0u);
  EXPECT_EQ(report.skipped, 5u);  // isolated ids 3, 7, 9, 27, 42
  EXPECT_FALSE(report.fraction_random.has_value());
}

TEST(AnalysisSummary, GoldenJson) {
  const auto parsed = load_trace(fixture("six_requests.jsonl"));
  const auto summary = cli::analysis_summary(parsed.trace, parsed.out_of_order, {});
  const auto golden = nlohmann::json::parse(read_file(fixture("golden/six_requests.summary.json")));
  EXPECT_EQ(summary, golden) << summary.dump(2);
}

}  // namespace
}  // namespace kvmeta
