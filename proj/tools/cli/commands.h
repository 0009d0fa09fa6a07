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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "analysis_io.h"
#include "kvmeta/meta_index.h"
#include "kvmeta/op_compiler.h"
#include "kvmeta/replay.h"

namespace kvmeta::cli {

// Process exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnavailable = 2;
inline constexpr int kExitAborted = 3;

struct AnalyzeOptions {
  std::filesystem::path trace;
  std::filesystem::path out_dir;
  AnalysisSettings settings;
  std::vector<std::string> argv;
};

// Writes hit_rate_cdf.csv, seq_fraction.csv, runs_test.csv,
// reuse_timeline.csv, summary.json and manifest.json into out_dir.
int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::filesystem::path trace;
  std::string backend = "inproc";
  CompileMode mode = CompileMode::kPreload;
  KeyScheme scheme = KeyScheme::kOrdered;
  std::string ns = "kvmeta";
  std::uint64_t chunk_split = 1;
  ReplayOptions replay;
  std::uint64_t interval_s = 60;
  std::uint64_t warmup_s = 600;
  std::filesystem::path out_dir;
  std::vector<std::string> argv;
};

// Writes latency_log.csv, interval_stats.csv, replay_summary.json and
// manifest.json; prints one p99 line per op kind. When the error-rate abort
// trips, outputs are still written, an ABORTED marker is added and the exit
// code is kExitAborted.
int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);

struct ServeOptions {
  std::string listen = "127.0.0.1:7070";
  StoreOptions store;
  double stats_interval_s = 60.0;
  std::optional<std::filesystem::path> manifest;
  std::vector<std::string> argv;
};

// Blocks until SIGINT or SIGTERM, then drains connections and returns.
int cmd_serve(const ServeOptions& options, std::ostream& out, std::ostream& err);

struct SynthOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> argv;
};

// Writes the trace to `out`, its fit report to `<out>.fit.json` and a
// manifest to `<out>.manifest.json`.
int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err);

struct ReportOptions {
  std::vector<std::string> inputs;  // "label=path" or "path"
  std::optional<std::string> baseline;
  std::optional<std::filesystem::path> cdf;
  std::filesystem::path out_dir;
  std::vector<std::string> argv;
};

// Writes <label>/normalized.csv per input, report.json, one
// p99_<op_kind>.svg chart per op kind and, given a CDF csv, hit_rate_cdf.svg.
int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

}  // namespace kvmeta::cli
