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

#include <nlohmann/json.hpp>

#include "kvmeta/trace.h"

namespace kvmeta {

struct PrefixTreeShape {
  std::uint32_t depth = 4;
  std::uint32_t branching = 4;
  std::uint32_t blocks_per_node = 8;
};

struct SuffixRange {
  std::uint32_t min = 2;
  std::uint32_t max = 16;
};

struct FitTargets {
  std::optional<double> seq_fraction;
  std::optional<double> mean_hit_rate;
};

struct SynthConfig {
  std::uint64_t num_requests = 1000;
  double mean_interarrival_ms = 100.0;
  PrefixTreeShape prefix_tree;
  double reuse_bias = 1.0;        // >= 0; weight of revisiting a walked child
  double random_block_rate = 0.0; // per-request chance of isolated ids
  SuffixRange suffix_blocks;
  std::uint64_t seed = 42;
  FitTargets targets;             // consumed by fit_report, not by generate

  // Throws Error(kInvalidArgument) naming the offending field.
  void validate() const;
};

// Up to this many isolated ids are appended when a request draws random ids.
inline constexpr std::uint32_t kMaxInjectedIds = 4;

// Field names mirror SynthConfig; unknown fields are rejected.
SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json synth_config_to_json(const SynthConfig& config);

// Deterministic prefix-tree workload.
//
// Tree nodes own contiguous id spans allocated from one global counter in
// creation order. A request picks a depth in [1, depth] and walks down from
// an implicit root; at each level it either follows an existing child, with
// weight reuse_bias * visits(child), or (while the node has fewer than
// `branching` children) opens a new child with weight 1. The path's ids are
// followed by fresh suffix ids, which retire into a pool from which isolated
// ids are injected with probability random_block_rate. Interarrival times are
// exponential with the configured mean.
//
// Throws Error(kEmptyTrace) when num_requests is 0.
Trace generate(const SynthConfig& config);

struct FitReport {
  std::uint64_t requests = 0;
  double seq_fraction = 0.0;   // mean per-request sequential fraction
  double mean_hit_rate = 0.0;  // mean per-request block hit rate
  std::optional<double> seq_fraction_deviation;
  std::optional<double> mean_hit_rate_deviation;
};

FitReport fit_report(const Trace& trace, const FitTargets& targets);
nlohmann::json fit_report_to_json(const FitReport& report);

}  // namespace kvmeta
