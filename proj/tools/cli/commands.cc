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

#include "commands.h"

#include <pthread.h>
#include <signal.h>

#include <cerrno>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "backend_spec.h"
#include "kvmeta/error.h"
#include "kvmeta/latency_stats.h"
#include "kvmeta/server.h"
#include "kvmeta/synth.h"
#include "manifest.h"
#include "svg.h"

namespace kvmeta::cli {
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string stats_line(const IndexStats& s) {
  return "puts=" + std::to_string(s.puts) + " gets=" + std::to_string(s.gets) +
         " scans=" + std::to_string(s.scans) + " deletes=" + std::to_string(s.deletes) +
         " cache_hits=" + std::to_string(s.cache_hits) +
         " cache_misses=" + std::to_string(s.cache_misses) +
         " resident_entries=" + std::to_string(s.resident_entries) +
         " stored_entries=" + std::to_string(s.stored_entries);
}

nlohmann::json store_json(const StoreOptions& s) {
  return {{"scheme", key_scheme_name(s.scheme)},
          {"max_entries", s.max_entries},
          {"cache",
           {{"capacity_entries", s.cache.capacity_entries},
            {"policy", cache_policy_name(s.cache.policy)},
            {"pin_first_n", s.cache.pin_first_n},
            {"hotness_halflife_s", s.cache.hotness_halflife_s}}}};
}

}  // namespace

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  manifest.command_line = options.argv;
  try {
    fs::create_directories(options.out_dir);
    const auto parsed = load_trace(options.trace);
    const Trace& trace = parsed.trace;
    if (parsed.out_of_order > 0) {
      err << "warning: " << parsed.out_of_order << " out-of-order records were re-sorted\n";
    }
    manifest.set_trace(options.trace, trace.label);
    manifest.config = {{"bucket_seconds", options.settings.bucket_seconds},
                       {"min_occurrences", options.settings.min_occurrences},
                       {"runs_mode", runs_mode_name(options.settings.runs_mode)}};

    {
      auto f = open_out(options.out_dir / "hit_rate_cdf.csv");
      write_hit_rate_cdf_csv(f, hit_rate_cdf(trace));
    }
    {
      auto f = open_out(options.out_dir / "seq_fraction.csv");
      write_seq_fraction_csv(f, trace);
    }
    {
      auto f = open_out(options.out_dir / "runs_test.csv");
      write_runs_test_csv(f, nonseq_randomness_report(trace, options.settings.min_occurrences,
                                                      options.settings.runs_mode));
    }
    {
      auto f = open_out(options.out_dir / "reuse_timeline.csv");
      write_reuse_timeline_csv(f, reuse_timeline(trace, options.settings.bucket_seconds));
    }
    const auto summary = analysis_summary(trace, parsed.out_of_order, options.settings);
    write_json(options.out_dir / "summary.json", summary);

    out << "requests=" << summary["requests"] << " mean_hit_rate=" << summary["hit_rate"]["mean"]
        << " hit_rate>0.5=" << summary["hit_rate"]["fraction_above_0_5"]
        << " mean_seq_fraction=" << summary["sequential_fraction"]["mean"] << '\n';
    manifest.write(options.out_dir / "manifest.json");
    return kExitOk;
  } catch (const std::exception& e) {
    err << "analyze: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  manifest.command_line = options.argv;
  try {
    fs::create_directories(options.out_dir);
    const auto parsed = load_trace(options.trace);
    manifest.set_trace(options.trace, parsed.trace.label);

    BackendSpec spec = parse_backend_spec(options.backend);
    spec.store.scheme = options.scheme;
    std::unique_ptr<Backend> backend;
    try {
      backend = open_backend(spec);
    } catch (const Error& e) {
      err << "bench: backend unavailable: " << e.what() << '\n';
      return kExitUnavailable;
    }
    manifest.backend = backend->describe();

    CompileOptions compile;
    compile.mode = options.mode;
    compile.ns = make_namespace(options.ns);
    compile.chunk_split = options.chunk_split;
    compile.scheme = options.scheme;
    manifest.config = {
        {"mode", compile_mode_name(options.mode)},
        {"key_scheme", key_scheme_name(options.scheme)},
        {"namespace", options.ns},
        {"chunk_split", options.chunk_split},
        {"schedule", schedule_name(options.replay.schedule)},
        {"time_scale", options.replay.time_scale},
        {"workers", options.replay.workers},
        {"abort_error_rate", options.replay.abort_error_rate},
        {"interval_s", options.interval_s},
        {"warmup_s", options.warmup_s},
        {"backend_spec", options.backend},
    };
    if (spec.kind == BackendSpec::Kind::kInproc) manifest.config["store"] = store_json(spec.store);

    const OpStream stream = compile_ops(parsed.trace, compile);
    LatencyLog log;
    try {
      log = replay(stream, *backend, options.replay);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kUnavailable || e.is_transport()) {
        err << "bench: " << e.what() << '\n';
        return kExitUnavailable;
      }
      throw;
    }

    {
      auto f = open_out(options.out_dir / "latency_log.csv");
      write_latency_log_csv(f, log);
    }
    const IntervalStats stats = interval_stats(log, options.interval_s, options.warmup_s);
    {
      auto f = open_out(options.out_dir / "interval_stats.csv");
      write_interval_stats_csv(f, stats);
    }

    std::map<OpKind, std::vector<std::uint64_t>> latencies;
    std::map<OpKind, std::uint64_t> misses, errors;
    std::vector<std::int64_t> lags;
    for (const auto& r : log.records) {
      if (r.outcome == Outcome::kError) {
        ++errors[r.kind];
        continue;
      }
      latencies[r.kind].push_back(r.latency_ns);
      if (r.outcome == Outcome::kMiss) ++misses[r.kind];
      lags.push_back(r.sched_lag_ns);
    }

    nlohmann::json summary;
    summary["ops_total"] = log.ops_total;
    summary["ops_dispatched"] = log.records.size();
    summary["covered_positions"] = stream.covered_positions();
    summary["preload_entries"] = stream.preload.size();
    summary["errors"] = log.errors;
    summary["aborted"] = log.aborted;
    summary["error_only_interval_errors"] = stats.error_only;
    for (auto kind : kAllOpKinds) {
      const auto name = std::string(op_kind_name(kind));
      const auto& lat = latencies[kind];
      nlohmann::json k = {{"count", lat.size()}, {"misses", misses[kind]}, {"errors", errors[kind]}};
      if (!lat.empty()) {
        k["p50_ns"] = percentile(lat, 0.50);
        k["p99_ns"] = percentile(lat, 0.99);
        out << name << ": n=" << lat.size() << " misses=" << misses[kind] << " errors=" << errors[kind]
            << " p50_ns=" << percentile(lat, 0.50) << " p99_ns=" << percentile(lat, 0.99) << '\n';
      } else if (errors[kind] > 0) {
        out << name << ": n=0 errors=" << errors[kind] << '\n';
      }
      summary["by_kind"][name] = k;
    }
    if (options.replay.schedule == Schedule::kFaithful && !lags.empty()) {
      std::vector<std::uint64_t> positive;
      for (auto l : lags) positive.push_back(l > 0 ? static_cast<std::uint64_t>(l) : 0);
      summary["sched_lag_p99_ns"] = percentile(positive, 0.99);
    }
    write_json(options.out_dir / "replay_summary.json", summary);

    manifest.aborted = log.aborted;
    if (log.aborted) {
      open_out(options.out_dir / "ABORTED") << "error-rate abort threshold tripped after "
                                            << log.records.size() << " of " << log.ops_total
                                            << " ops; outputs are partial\n";
      err << "bench: aborted, error rate exceeded " << options.replay.abort_error_rate << '\n';
      manifest.exit_code = kExitAborted;
      manifest.write(options.out_dir / "manifest.json");
      return kExitAborted;
    }
    manifest.write(options.out_dir / "manifest.json");
    return kExitOk;
  } catch (const std::exception& e) {
    err << "bench: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_serve(const ServeOptions& options, std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  manifest.command_line = options.argv;
  manifest.config = {{"listen", options.listen},
                     {"stats_interval_s", options.stats_interval_s},
                     {"store", store_json(options.store)}};
  try {
    // Block termination signals before any thread starts so they are only
    // ever consumed by sigtimedwait below.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    MetaIndex index(options.store);
    manifest.backend = index.describe();
    Server server(index, net::parse_endpoint(options.listen));
    server.start();
    out << "listening on " << server.endpoint().to_string() << std::endl;

    const double interval = options.stats_interval_s > 0 ? options.stats_interval_s : 60.0;
    timespec wait{};
    wait.tv_sec = static_cast<time_t>(interval);
    wait.tv_nsec = static_cast<long>((interval - std::floor(interval)) * 1e9);
    while (true) {
      const int sig = sigtimedwait(&signals, nullptr, &wait);
      if (sig == SIGINT || sig == SIGTERM) break;
      if (sig < 0 && errno != EAGAIN && errno != EINTR) break;
      err << "[kvmeta serve] " << iso8601(std::chrono::system_clock::now()) << ' '
          << stats_line(index.stats()) << std::endl;
    }
    server.stop();
    err << "[kvmeta serve] final " << stats_line(index.stats()) << std::endl;
    if (options.manifest) manifest.write(*options.manifest);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "serve: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  manifest.command_line = options.argv;
  try {
    std::ifstream in(options.config);
    if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + options.config.string());
    const auto j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw Error(ErrorCode::kParse, options.config.string() + " is not valid JSON");
    SynthConfig config = synth_config_from_json(j);
    if (options.seed) config.seed = *options.seed;
    manifest.config = synth_config_to_json(config);

    Trace trace = generate(config);
    if (options.out.has_parent_path()) fs::create_directories(options.out.parent_path());
    write_trace(trace, options.out);

    const FitReport fit = fit_report(trace, config.targets);
    fs::path fit_path = options.out;
    fit_path += ".fit.json";
    write_json(fit_path, fit_report_to_json(fit));

    manifest.set_trace(options.out, trace.label);
    fs::path manifest_path = options.out;
    manifest_path += ".manifest.json";
    manifest.write(manifest_path);

    out << "wrote " << trace.requests.size() << " requests, sha256=" << manifest.trace_sha256
        << " seq_fraction=" << fit.seq_fraction << " mean_hit_rate=" << fit.mean_hit_rate << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "synth: " << e.what() << '\n';
    return kExitError;
  }
}

namespace {

struct LabeledStats {
  std::string label;
  IntervalStats stats;
};

LabeledStats load_labeled(const std::string& input) {
  LabeledStats ls;
  fs::path path;
  if (const auto eq = input.find('='); eq != std::string::npos) {
    ls.label = input.substr(0, eq);
    path = input.substr(eq + 1);
  } else {
    path = input;
    ls.label = path.filename() == "interval_stats.csv" && path.has_parent_path()
                   ? path.parent_path().filename().string()
                   : path.stem().string();
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path.string());
  ls.stats = read_interval_stats_csv(in);
  return ls;
}

using CellId = std::pair<std::uint64_t, OpKind>;

std::set<CellId> cell_set(const IntervalStats& s) {
  std::set<CellId> out;
  for (const auto& c : s.cells) out.insert({c.interval_index, c.kind});
  return out;
}

}  // namespace

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  manifest.command_line = options.argv;
  try {
    if (options.inputs.empty()) throw Error(ErrorCode::kInvalidArgument, "report needs at least one input");
    std::vector<LabeledStats> inputs;
    for (const auto& in : options.inputs) inputs.push_back(load_labeled(in));
    std::set<std::string> labels;
    for (const auto& ls : inputs) {
      if (!labels.insert(ls.label).second) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate input label '" + ls.label + "'");
      }
    }
    const std::string baseline_label = options.baseline.value_or(inputs.front().label);
    const auto base_it = std::find_if(inputs.begin(), inputs.end(),
                                      [&](const LabeledStats& l) { return l.label == baseline_label; });
    if (base_it == inputs.end()) {
      throw Error(ErrorCode::kInvalidArgument, "baseline '" + baseline_label + "' is not among the inputs");
    }
    const LabeledStats& baseline = *base_it;

    const auto base_cells = cell_set(baseline.stats);
    std::string mismatch;
    for (const auto& ls : inputs) {
      const auto cells = cell_set(ls.stats);
      for (const auto& c : base_cells) {
        if (!cells.contains(c)) {
          mismatch += "  " + ls.label + " lacks (" + std::to_string(c.first) + "," +
                      std::string(op_kind_name(c.second)) + ")\n";
        }
      }
      for (const auto& c : cells) {
        if (!base_cells.contains(c)) {
          mismatch += "  " + baseline.label + " lacks (" + std::to_string(c.first) + "," +
                      std::string(op_kind_name(c.second)) + ") present in " + ls.label + "\n";
        }
      }
    }
    if (!mismatch.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "mismatched interval grids:\n" + mismatch);
    }

    fs::create_directories(options.out_dir);
    nlohmann::json report;
    report["baseline"] = baseline.label;
    std::map<OpKind, std::vector<Series>> charts;
    for (const auto& ls : inputs) {
      const NormalizedReport norm = normalize(ls.stats, baseline.stats);
      fs::create_directories(options.out_dir / ls.label);
      {
        auto f = open_out(options.out_dir / ls.label / "normalized.csv");
        write_normalized_csv(f, norm);
      }
      for (const auto& [kind, mean] : norm.mean_ratio) {
        report["mean_ratio"][ls.label][std::string(op_kind_name(kind))] = mean;
        out << ls.label << ' ' << op_kind_name(kind) << " mean normalized p99 = " << mean << '\n';
      }
      std::map<OpKind, Series> per_kind;
      for (const auto& c : norm.cells) {
        if (!c.defined) continue;
        auto& s = per_kind[c.kind];
        s.label = ls.label;
        s.points.emplace_back(static_cast<double>(c.interval_index), c.ratio);
      }
      for (auto& [kind, s] : per_kind) charts[kind].push_back(std::move(s));
    }
    write_json(options.out_dir / "report.json", report);

    for (const auto& [kind, series] : charts) {
      ChartSpec spec;
      spec.title = "Normalized p99 " + std::string(op_kind_name(kind)) + " latency (" + baseline.label + "=1)";
      spec.x_label = "interval index";
      spec.y_label = "normalized p99";
      auto f = open_out(options.out_dir / ("p99_" + std::string(op_kind_name(kind)) + ".svg"));
      f << line_chart_svg(spec, series);
    }

    if (options.cdf) {
      std::ifstream in(*options.cdf);
      if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + options.cdf->string());
      const HitRateCdf cdf = read_hit_rate_cdf_csv(in);
      Series s;
      s.label = options.cdf->parent_path().filename().string();
      if (s.label.empty()) s.label = "trace";
      s.points.emplace_back(0.0, 0.0);
      for (const auto& p : cdf.points) s.points.emplace_back(p.hit_rate, p.cumulative_fraction);
      s.points.emplace_back(1.0, 1.0);
      ChartSpec spec;
      spec.title = "CDF of block hit ratio";
      spec.x_label = "block hit ratio";
      spec.y_label = "fraction of requests";
      spec.x_min = 0.0;
      spec.x_max = 1.0;
      spec.y_min = 0.0;
      spec.y_max = 1.0;
      spec.step = true;
      auto f = open_out(options.out_dir / "hit_rate_cdf.svg");
      f << line_chart_svg(spec, {s});
    }

    manifest.config = {{"inputs", options.inputs}, {"baseline", baseline.label}};
    manifest.write(options.out_dir / "manifest.json");
    return kExitOk;
  } catch (const std::exception& e) {
    err << "report: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace kvmeta::cli
