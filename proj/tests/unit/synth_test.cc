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

#include <gtest/gtest.h>

#include "kvmeta/analysis.h"
#include "kvmeta/error.h"
#include "kvmeta/synth.h"

namespace kvmeta {
namespace {

TEST(Synth, DeterministicForSeed) {
  SynthConfig c;
  c.random_block_rate = 0.3;
  EXPECT_EQ(serialize_trace(generate(c)), serialize_trace(generate(c)));
  SynthConfig other = c;
  other.seed = c.seed + 1;
  EXPECT_NE(serialize_trace(generate(c)), serialize_trace(generate(other)));
}

TEST(Synth, ShapeOfOutput) {
  SynthConfig c;
  c.num_requests = 500;
  const auto t = generate(c);
  ASSERT_EQ(t.requests.size(), 500u);
  EXPECT_EQ(t.requests[0].arrival_ms, 0u);
  for (std::size_t i = 1; i < t.requests.size(); ++i) {
    EXPECT_GE(t.requests[i].arrival_ms, t.requests[i - 1].arrival_ms);
  }
  for (const auto& r : t.requests) {
    EXPECT_GE(r.output_len, 64u);
    EXPECT_LE(r.output_len, 512u);
    EXPECT_EQ(r.input_len, r.block_ids.size() * t.block_tokens);
    EXPECT_GE(r.block_ids.size(), c.prefix_tree.blocks_per_node + c.suffix_blocks.min);
  }
  // Mean interarrival is near the configured 100 ms.
  const double mean = static_cast<double>(t.requests.back().arrival_ms) / 499.0;
  EXPECT_GT(mean, 80.0);
  EXPECT_LT(mean, 120.0);
}

TEST(Synth, FreshPathsNeverHit) {
  SynthConfig c;
  c.num_requests = 300;
  c.reuse_bias = 0.0;
  c.random_block_rate = 0.0;
  c.prefix_tree = {3, 300, 4};
  const auto t = generate(c);
  for (const auto& r : request_hit_rates(t)) EXPECT_EQ(r.hit_rate, 0.0);
  const auto fit = fit_report(t, FitTargets{std::nullopt, 0.5});
  EXPECT_EQ(fit.mean_hit_rate, 0.0);
  EXPECT_DOUBLE_EQ(*fit.mean_hit_rate_deviation, 0.5);
}

TEST(Synth, NoInjectionIsFullySequential) {
  SynthConfig c;
  c.num_requests = 400;
  c.random_block_rate = 0.0;
  c.suffix_blocks = {2, 6};
  EXPECT_EQ(mean_sequential_fraction(generate(c)), 1.0);
}

TEST(Synth, ReuseBiasProducesReuse) {
  SynthConfig c;
  c.num_requests = 400;
  c.reuse_bias = 4.0;
  const auto fit = fit_report(generate(c), {});
  EXPECT_GT(fit.mean_hit_rate, 0.2);
}

TEST(Synth, InjectionLowersSequentialFraction) {
  SynthConfig c;
  c.num_requests = 1000;
  c.prefix_tree.blocks_per_node = 2;
  c.suffix_blocks = {2, 4};
  c.random_block_rate = 1.0;
  const double seq = mean_sequential_fraction(generate(c));
  EXPECT_LT(seq, 1.0);
  EXPECT_GT(seq, 0.3);
}

TEST(Synth, FitAgainstOwnValuesIsZero) {
  const auto t = generate(SynthConfig{});
  const auto measured = fit_report(t, {});
  const auto fit = fit_report(t, FitTargets{measured.seq_fraction, measured.mean_hit_rate});
  EXPECT_EQ(*fit.seq_fraction_deviation, 0.0);
  EXPECT_EQ(*fit.mean_hit_rate_deviation, 0.0);
}

TEST(Synth, EmptyTrace) {
  SynthConfig c;
  c.num_requests = 0;
  try {
    generate(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyTrace);
    EXPECT_EQ(std::string(e.what()), "empty trace");
  }
}

TEST(SynthConfig, JsonRoundTripAndValidation) {
  SynthConfig c;
  c.num_requests = 77;
  c.targets.seq_fraction = 0.87;
  const auto back = synth_config_from_json(synth_config_to_json(c));
  EXPECT_EQ(synth_config_to_json(back), synth_config_to_json(c));

  auto field_error = [](const nlohmann::json& j) -> std::string {
    try {
      synth_config_from_json(j);
    } catch (const Error& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(field_error({{"bogus", 1}}).find("bogus"), std::string::npos);
  EXPECT_NE(field_error({{"random_block_rate", 1.5}}).find("random_block_rate"), std::string::npos);
  EXPECT_NE(field_error({{"prefix_tree", {{"depth", -1}}}}).find("depth"), std::string::npos);
  EXPECT_NE(field_error({{"suffix_blocks", {{"min", 9}, {"max", 3}}}}).find("suffix_blocks"),
            std::string::npos);
  EXPECT_NE(field_error({{"num_requests", "many"}}).find("num_requests"), std::string::npos);
}

}  // namespace
}  // namespace kvmeta
