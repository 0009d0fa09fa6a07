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

#include "kvmeta/runs_test.h"

#include <cmath>
#include <numbers>
#include <string>

#include "kvmeta/error.h"

namespace kvmeta {

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

RunsTestStat runs_test_from_counts(std::uint64_t n1, std::uint64_t n2,
                                   std::uint64_t runs) {
  const std::uint64_t n = n1 + n2;
  if (n1 == 0 || n2 == 0) {
    throw Error(ErrorCode::kDegenerate, "degenerate sequence: single category");
  }
  if (n < kMinRunsTestLength) {
    throw Error(ErrorCode::kDegenerate,
                "degenerate sequence: length " + std::to_string(n) + " < " +
                    std::to_string(kMinRunsTestLength));
  }
  if (runs < 1 || runs > n) {
    throw Error(ErrorCode::kInvalidArgument, "run count out of range");
  }

  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  const double total = a + b;
  const double two_ab = 2.0 * a * b;

  RunsTestStat s;
  s.n1 = n1;
  s.n2 = n2;
  s.runs = runs;
  s.mean_runs = 1.0 + two_ab / total;
  s.var_runs = two_ab * (two_ab - total) / (total * total * (total - 1.0));
  s.z = (static_cast<double>(runs) - s.mean_runs) / std::sqrt(s.var_runs);
  // 2 * (1 - Phi(|z|)) == erfc(|z| / sqrt 2), without the cancellation.
  s.p_value = s.z == 0.0 ? 1.0 : std::erfc(std::fabs(s.z) / std::numbers::sqrt2);
  if (s.p_value > 1.0) s.p_value = 1.0;
  return s;
}

RunsTestStat runs_test(std::span<const RunSymbol> seq) {
  std::uint64_t n1 = 0;
  std::uint64_t runs = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] == RunSymbol::kA) ++n1;
    if (i == 0 || seq[i] != seq[i - 1]) ++runs;
  }
  return runs_test_from_counts(n1, seq.size() - n1, runs);
}

}  // namespace kvmeta
