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

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "backend_spec.h"
#include "commands.h"
#include "kvmeta/error.h"

namespace {

using namespace kvmeta;
using namespace kvmeta::cli;

struct Shared {
  std::uint64_t seed = 0;
  std::uint64_t interval_s = 60;
  std::uint64_t warmup_s = 600;
  double time_scale = 1.0;
  std::size_t workers = 1;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);

  CLI::App app{"kvmeta: KV-cache metadata trace analysis and store benchmarking"};
  app.set_version_flag("--version", std::string(KVMETA_VERSION));
  app.require_subcommand(1);

  Shared shared;

  // analyze
  AnalyzeOptions analyze;
  std::string runs_mode = "per_key_gaps";
  auto* a = app.add_subcommand("analyze", "Compute reuse statistics for a trace");
  a->add_option("trace", analyze.trace, "JSON-Lines trace (.jsonl or .jsonl.gz)")->required();
  a->add_option("--out", analyze.out_dir, "Output directory")->required();
  a->add_option("--interval", analyze.settings.bucket_seconds, "Reuse timeline bucket (s)")
      ->capture_default_str();
  a->add_option("--min-occurrences", analyze.settings.min_occurrences,
                "Minimum sample size for the runs test")
      ->capture_default_str();
  a->add_option("--runs-mode", runs_mode, "per_key_gaps | per_request_median")->capture_default_str();

  // bench
  BenchOptions bench;
  std::string mode = "preload", scheme = "ordered", schedule = "closed";
  auto* b = app.add_subcommand("bench", "Replay a trace against a metadata backend");
  b->add_option("trace", bench.trace, "JSON-Lines trace")->required();
  b->add_option("--backend", bench.backend,
                "inproc[:k=v,...] | remote:host:port | external[:host:port]")
      ->capture_default_str();
  b->add_option("--mode", mode, "preload | insert_on_miss")->capture_default_str();
  b->add_option("--key-scheme", scheme, "ordered | strict_hash")->capture_default_str();
  b->add_option("--namespace", bench.ns, "Key namespace")->capture_default_str();
  b->add_option("--chunk-split", bench.chunk_split, "Sub-blocks per trace block")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  b->add_option("--schedule", schedule, "faithful | closed")->capture_default_str();
  b->add_option("--time-scale", shared.time_scale, "Faithful schedule speed-up factor")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  b->add_option("--workers", shared.workers, "Concurrent workers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  b->add_option("--abort-error-rate", bench.replay.abort_error_rate, "Abort threshold")
      ->capture_default_str();
  b->add_option("--interval", shared.interval_s, "Statistics interval (s)")->capture_default_str();
  b->add_option("--warmup", shared.warmup_s, "Warm-up excluded from statistics (s)")
      ->capture_default_str();
  b->add_option("--out", bench.out_dir, "Output directory")->required();

  // serve
  ServeOptions serve;
  std::string serve_scheme = "ordered", policy = "lru";
  auto* s = app.add_subcommand("serve", "Run the metadata store as a TCP service");
  s->add_option("--listen", serve.listen, "host:port (port 0 picks a free port)")
      ->capture_default_str();
  s->add_option("--cache-capacity", serve.store.cache.capacity_entries, "Hot cache entries (0 disables)")
      ->capture_default_str();
  s->add_option("--policy", policy, "lru | lru_pin")->capture_default_str();
  s->add_option("--pin-first-n", serve.store.cache.pin_first_n, "Pinned lowest ids per namespace")
      ->capture_default_str();
  s->add_option("--halflife", serve.store.cache.hotness_halflife_s, "Hotness half-life (s)")
      ->capture_default_str();
  s->add_option("--key-scheme", serve_scheme, "ordered | strict_hash")->capture_default_str();
  s->add_option("--max-entries", serve.store.max_entries, "Entry limit (0 = unbounded)")
      ->capture_default_str();
  s->add_option("--interval", serve.stats_interval_s, "Stats logging interval (s)")
      ->capture_default_str();
  std::string serve_manifest;
  s->add_option("--manifest", serve_manifest, "Write a run manifest on shutdown");

  // synth
  SynthOptions synth;
  auto* y = app.add_subcommand("synth", "Generate a synthetic trace");
  y->add_option("--config", synth.config, "Generator config JSON")->required();
  y->add_option("--out", synth.out, "Output trace path")->required();
  auto* seed_opt = y->add_option("--seed", shared.seed, "Override the config seed");

  // report
  ReportOptions report;
  std::string baseline, cdf;
  auto* r = app.add_subcommand("report", "Normalize and chart interval statistics");
  r->add_option("inputs", report.inputs, "interval_stats.csv files, optionally label=path")
      ->required();
  r->add_option("--baseline", baseline, "Baseline label (default: first input)");
  r->add_option("--cdf", cdf, "hit_rate_cdf.csv to chart");
  r->add_option("--out", report.out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (a->parsed()) {
      analyze.settings.runs_mode = parse_runs_mode(runs_mode);
      analyze.argv = args;
      return cmd_analyze(analyze, std::cout, std::cerr);
    }
    if (b->parsed()) {
      bench.mode = parse_compile_mode(mode);
      bench.scheme = parse_key_scheme(scheme);
      bench.replay.schedule = parse_schedule(schedule);
      bench.replay.time_scale = shared.time_scale;
      bench.replay.workers = shared.workers;
      bench.interval_s = shared.interval_s;
      bench.warmup_s = shared.warmup_s;
      bench.argv = args;
      return cmd_bench(bench, std::cout, std::cerr);
    }
    if (s->parsed()) {
      serve.store.cache.policy = parse_cache_policy(policy);
      serve.store.scheme = parse_key_scheme(serve_scheme);
      serve.store.cache.validate();
      if (!serve_manifest.empty()) serve.manifest = serve_manifest;
      serve.argv = args;
      return cmd_serve(serve, std::cout, std::cerr);
    }
    if (y->parsed()) {
      if (seed_opt->count() > 0) synth.seed = shared.seed;
      synth.argv = args;
      return cmd_synth(synth, std::cout, std::cerr);
    }
    if (r->parsed()) {
      if (!baseline.empty()) report.baseline = baseline;
      if (!cdf.empty()) report.cdf = cdf;
      report.argv = args;
      return cmd_report(report, std::cout, std::cerr);
    }
  } catch (const kvmeta::Error& e) {
    std::cerr << "kvmeta: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
