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

#include "kvmeta/latency_stats.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "kvmeta/error.h"

namespace kvmeta {

template <typename T>
T percentile(std::span<const T> samples, double q) {
  if (samples.empty()) throw Error(ErrorCode::kInvalidArgument, "percentile of empty samples");
  if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "percentile q must lie in (0, 1]");
  std::vector<T> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // Absorb representation error so that e.g. 0.07 * 100 ranks as 7, not 8.
  const double exact = q * n;
  auto rank = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

template std::uint64_t percentile<std::uint64_t>(std::span<const std::uint64_t>, double);
template double percentile<double>(std::span<const double>, double);

IntervalStats interval_stats(const LatencyLog& log, std::uint64_t interval_s,
                             std::uint64_t warmup_s) {
  if (interval_s == 0) throw Error(ErrorCode::kInvalidArgument, "interval must be >= 1 s");
  struct Bucket {
    std::vector<std::uint64_t> latencies;
    std::uint64_t errors = 0;
  };
  std::map<std::pair<std::uint64_t, std::uint8_t>, Bucket> buckets;
  const std::uint64_t warmup_ms = warmup_s * 1000;
  const std::uint64_t width_ms = interval_s * 1000;
  for (const auto& rec : log.records) {
    if (rec.issue_ms < warmup_ms) continue;
    auto& b = buckets[{rec.issue_ms / width_ms, static_cast<std::uint8_t>(rec.kind)}];
    if (rec.outcome == Outcome::kError) {
      ++b.errors;
    } else {
      b.latencies.push_back(rec.latency_ns);
    }
  }

  IntervalStats stats;
  for (const auto& [cell, b] : buckets) {
    if (b.latencies.empty()) {
      stats.error_only += b.errors;
      continue;
    }
    IntervalCell c;
    c.interval_index = cell.first;
    c.kind = static_cast<OpKind>(cell.second);
    c.count = b.latencies.size();
    c.errors = b.errors;
    c.p50_ns = percentile(b.latencies, 0.50);
    c.p99_ns = percentile(b.latencies, 0.99);
    stats.cells.push_back(c);
  }
  return stats;
}

NormalizedReport normalize(const IntervalStats& stats, const IntervalStats& baseline) {
  std::map<std::pair<std::uint64_t, std::uint8_t>, std::uint64_t> base;
  for (const auto& c : baseline.cells) {
    base[{c.interval_index, static_cast<std::uint8_t>(c.kind)}] = c.p99_ns;
  }
  NormalizedReport report;
  std::map<std::uint8_t, std::pair<double, std::uint64_t>> sums;
  for (const auto& c : stats.cells) {
    auto it = base.find({c.interval_index, static_cast<std::uint8_t>(c.kind)});
    if (it == base.end()) continue;
    NormalizedCell n;
    n.interval_index = c.interval_index;
    n.kind = c.kind;
    if (it->second == 0) {
      n.defined = false;
    } else {
      n.ratio = static_cast<double>(c.p99_ns) / static_cast<double>(it->second);
      auto& s = sums[static_cast<std::uint8_t>(c.kind)];
      s.first += n.ratio;
      ++s.second;
    }
    report.cells.push_back(n);
  }
  if (report.cells.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no shared (interval, op_kind) cells to normalize");
  }
  for (const auto& [kind, s] : sums) {
    report.mean_ratio.emplace_back(static_cast<OpKind>(kind), s.first / static_cast<double>(s.second));
  }
  return report;
}

namespace {

constexpr std::string_view kLatencyHeader = "op_kind,issue_ms,latency_ns,outcome";
constexpr std::string_view kIntervalHeader = "interval_index,op_kind,count,p50_ns,p99_ns";
constexpr std::string_view kNormalizedHeader = "interval_index,op_kind,ratio";

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    out.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

std::uint64_t to_u64(std::string_view s, std::size_t line_no) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParse, "csv line " + std::to_string(line_no) + ": bad integer '" +
                                       std::string(s) + "'");
  }
  return v;
}

template <typename Fn>
void read_rows(std::istream& in, std::string_view header, std::size_t columns, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != header) {
        throw Error(ErrorCode::kParse, "unexpected csv header '" + line + "', want '" +
                                           std::string(header) + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != columns) {
      throw Error(ErrorCode::kParse, "csv line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(columns) + " fields");
    }
    fn(fields, line_no);
  }
  if (line_no == 0) throw Error(ErrorCode::kParse, "empty csv");
}

}  // namespace

void write_latency_log_csv(std::ostream& out, const LatencyLog& log) {
  out << kLatencyHeader << '\n';
  for (const auto& r : log.records) {
    out << op_kind_name(r.kind) << ',' << r.issue_ms << ',' << r.latency_ns << ','
        << outcome_name(r.outcome) << '\n';
  }
}

void write_interval_stats_csv(std::ostream& out, const IntervalStats& stats) {
  out << kIntervalHeader << '\n';
  for (const auto& c : stats.cells) {
    out << c.interval_index << ',' << op_kind_name(c.kind) << ',' << c.count << ',' << c.p50_ns
        << ',' << c.p99_ns << '\n';
  }
}

void write_normalized_csv(std::ostream& out, const NormalizedReport& report) {
  out << kNormalizedHeader << '\n';
  std::ostringstream num;
  num.precision(17);
  for (const auto& c : report.cells) {
    out << c.interval_index << ',' << op_kind_name(c.kind) << ',';
    if (c.defined) {
      num.str({});
      num << c.ratio;
      out << num.str();
    } else {
      out << "nan";
    }
    out << '\n';
  }
}

IntervalStats read_interval_stats_csv(std::istream& in) {
  IntervalStats stats;
  read_rows(in, kIntervalHeader, 5, [&](const auto& f, std::size_t line_no) {
    IntervalCell c;
    c.interval_index = to_u64(f[0], line_no);
    c.kind = parse_op_kind(f[1]);
    c.count = to_u64(f[2], line_no);
    c.p50_ns = to_u64(f[3], line_no);
    c.p99_ns = to_u64(f[4], line_no);
    stats.cells.push_back(c);
  });
  return stats;
}

LatencyLog read_latency_log_csv(std::istream& in) {
  LatencyLog log;
  read_rows(in, kLatencyHeader, 4, [&](const auto& f, std::size_t line_no) {
    LatencyRecord r;
    r.kind = parse_op_kind(f[0]);
    r.issue_ms = to_u64(f[1], line_no);
    r.latency_ns = to_u64(f[2], line_no);
    r.outcome = parse_outcome(f[3]);
    r.op_index = log.records.size();
    if (r.outcome == Outcome::kError) ++log.errors;
    log.records.push_back(r);
  });
  log.ops_total = log.records.size();
  return log;
}

}  // namespace kvmeta
