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

#include "analysis_io.h"

#include <charconv>
#include <istream>
#include <ostream>

#include "kvmeta/error.h"
#include "kvmeta/latency_stats.h"

namespace kvmeta::cli {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string_view runs_mode_name(RunsTestMode mode) {
  return mode == RunsTestMode::kPerKeyGaps ? "per_key_gaps" : "per_request_median";
}

RunsTestMode parse_runs_mode(std::string_view name) {
  if (name == "per_key_gaps") return RunsTestMode::kPerKeyGaps;
  if (name == "per_request_median") return RunsTestMode::kPerRequestMedian;
  throw Error(ErrorCode::kInvalidArgument, "unknown runs-test mode '" + std::string(name) + "'");
}

void write_hit_rate_cdf_csv(std::ostream& out, const HitRateCdf& cdf) {
  out << "hit_rate,cum_fraction\n";
  for (const auto& p : cdf.points) {
    out << format_double(p.hit_rate) << ',' << format_double(p.cumulative_fraction) << '\n';
  }
}

void write_seq_fraction_csv(std::ostream& out, const Trace& trace) {
  out << "request_index,arrival_ms,fraction\n";
  for (std::size_t i = 0; i < trace.requests.size(); ++i) {
    const auto& r = trace.requests[i];
    if (r.block_ids.empty()) continue;
    out << i << ',' << r.arrival_ms << ',' << format_double(sequential_fraction(r.block_ids)) << '\n';
  }
}

void write_runs_test_csv(std::ostream& out, const RunsTestReport& report) {
  out << "key_or_request,p_value,n1,n2,runs\n";
  for (const auto& e : report.entries) {
    out << e.key << ',' << format_double(e.stat.p_value) << ',' << e.stat.n1 << ',' << e.stat.n2
        << ',' << e.stat.runs << '\n';
  }
}

void write_reuse_timeline_csv(std::ostream& out, const ReuseTimeline& timeline) {
  out << "bucket_s,block_id\n";
  for (const auto& p : timeline.points) out << p.bucket << ',' << p.block_id << '\n';
}

HitRateCdf read_hit_rate_cdf_csv(std::istream& in) {
  HitRateCdf cdf;
  std::string line;
  if (!std::getline(in, line) || line != "hit_rate,cum_fraction") {
    throw Error(ErrorCode::kParse, "hit_rate_cdf.csv: unexpected header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::kParse, "hit_rate_cdf.csv: bad row");
    CdfPoint p;
    auto r1 = std::from_chars(line.data(), line.data() + comma, p.hit_rate);
    auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), p.cumulative_fraction);
    if (r1.ec != std::errc() || r2.ec != std::errc()) {
      throw Error(ErrorCode::kParse, "hit_rate_cdf.csv: bad number in '" + line + "'");
    }
    cdf.points.push_back(p);
  }
  return cdf;
}

namespace {

nlohmann::json runs_summary(const RunsTestReport& r) {
  nlohmann::json j = {{"tested", r.tested}, {"skipped", r.skipped}};
  j["fraction_random"] = r.fraction_random ? nlohmann::json(*r.fraction_random) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

nlohmann::json analysis_summary(const Trace& trace, std::size_t out_of_order,
                                const AnalysisSettings& settings) {
  const auto rates = request_hit_rates(trace);
  if (rates.empty()) throw Error(ErrorCode::kUndefined, "trace has no non-empty requests");

  std::vector<double> values;
  values.reserve(rates.size());
  double sum = 0.0;
  std::size_t above_half = 0;
  for (const auto& r : rates) {
    values.push_back(r.hit_rate);
    sum += r.hit_rate;
    if (r.hit_rate > 0.5) ++above_half;
  }
  const double n = static_cast<double>(rates.size());

  nlohmann::json j;
  j["label"] = trace.label;
  j["requests"] = trace.requests.size();
  j["non_empty_requests"] = rates.size();
  j["total_blocks"] = trace.total_blocks();
  j["out_of_order_records"] = out_of_order;
  j["hit_rate"] = {
      {"mean", sum / n},
      {"p50", percentile(values, 0.50)},
      {"p90", percentile(values, 0.90)},
      {"p99", percentile(values, 0.99)},
      {"fraction_above_0_5", static_cast<double>(above_half) / n},
  };
  j["sequential_fraction"] = {{"mean", mean_sequential_fraction(trace)}};
  j["runs_test"] = {
      {"min_occurrences", settings.min_occurrences},
      {"alpha", kRandomnessAlpha},
      {"per_key_gaps",
       runs_summary(nonseq_randomness_report(trace, settings.min_occurrences, RunsTestMode::kPerKeyGaps))},
      {"per_request_median",
       runs_summary(nonseq_randomness_report(trace, settings.min_occurrences,
                                             RunsTestMode::kPerRequestMedian))},
  };
  return j;
}

}  // namespace kvmeta::cli
