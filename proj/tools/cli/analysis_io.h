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

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "kvmeta/analysis.h"

namespace kvmeta::cli {

// Shortest decimal that round-trips.
std::string format_double(double v);

// Headers, exactly:
//   hit_rate_cdf.csv    hit_rate,cum_fraction
//   seq_fraction.csv    request_index,arrival_ms,fraction
//   runs_test.csv       key_or_request,p_value,n1,n2,runs
//   reuse_timeline.csv  bucket_s,block_id
void write_hit_rate_cdf_csv(std::ostream& out, const HitRateCdf& cdf);
void write_seq_fraction_csv(std::ostream& out, const Trace& trace);
void write_runs_test_csv(std::ostream& out, const RunsTestReport& report);
void write_reuse_timeline_csv(std::ostream& out, const ReuseTimeline& timeline);

HitRateCdf read_hit_rate_cdf_csv(std::istream& in);

struct AnalysisSettings {
  std::uint64_t bucket_seconds = 60;
  std::size_t min_occurrences = 8;
  RunsTestMode runs_mode = RunsTestMode::kPerKeyGaps;  // mode written to runs_test.csv
};

// Summary statistics of a trace, both runs-test modes included.
nlohmann::json analysis_summary(const Trace& trace, std::size_t out_of_order,
                                const AnalysisSettings& settings);

std::string_view runs_mode_name(RunsTestMode mode);
RunsTestMode parse_runs_mode(std::string_view name);

}  // namespace kvmeta::cli
