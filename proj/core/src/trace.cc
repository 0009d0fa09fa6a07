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

#include "kvmeta/trace.h"

#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kvmeta/error.h"

namespace kvmeta {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kEmptyTrace: return "empty_trace";
    case ErrorCode::kUndefined: return "undefined";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kBadRange: return "bad_range";
    case ErrorCode::kScansDisabled: return "scans_disabled";
    case ErrorCode::kResourceExhausted: return "resource_exhausted";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kBackend: return "backend";
    case ErrorCode::kUnavailable: return "unavailable";
  }
  return "unknown";
}

std::size_t Trace::total_blocks() const {
  std::size_t n = 0;
  for (const auto& r : requests) n += r.block_ids.size();
  return n;
}

namespace {

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParse,
              "trace line " + std::to_string(line_no) + ": " + what);
}

std::uint64_t unsigned_field(const nlohmann::json& obj, const char* name,
                             std::size_t line_no) {
  auto it = obj.find(name);
  if (it == obj.end()) fail_line(line_no, std::string("missing field '") + name + "'");
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer()) {
    fail_line(line_no, std::string("negative value in '") + name + "'");
  }
  fail_line(line_no, std::string("field '") + name + "' is not an integer");
}

TraceRequest parse_record(std::string_view line, std::size_t line_no) {
  nlohmann::json obj = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded()) fail_line(line_no, "not valid JSON");
  if (!obj.is_object()) fail_line(line_no, "record is not a JSON object");

  TraceRequest req;
  req.arrival_ms = unsigned_field(obj, "timestamp", line_no);
  req.input_len = unsigned_field(obj, "input_length", line_no);
  req.output_len = unsigned_field(obj, "output_length", line_no);

  auto ids = obj.find("hash_ids");
  if (ids == obj.end()) fail_line(line_no, "missing field 'hash_ids'");
  if (!ids->is_array()) fail_line(line_no, "field 'hash_ids' is not an array");
  req.block_ids.reserve(ids->size());
  for (const auto& id : *ids) {
    if (id.is_number_unsigned()) {
      req.block_ids.push_back(id.get<BlockId>());
    } else if (id.is_number_integer()) {
      fail_line(line_no, "negative block id in 'hash_ids'");
    } else {
      fail_line(line_no, "non-integer block id in 'hash_ids'");
    }
  }
  return req;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  });
}

ParseResult finish(std::vector<TraceRequest> requests, std::string label) {
  if (requests.empty()) throw Error(ErrorCode::kEmptyTrace, "empty trace");
  ParseResult result;
  for (std::size_t i = 1; i < requests.size(); ++i) {
    if (requests[i].arrival_ms < requests[i - 1].arrival_ms) ++result.out_of_order;
  }
  if (result.out_of_order > 0) {
    std::stable_sort(requests.begin(), requests.end(),
                     [](const TraceRequest& a, const TraceRequest& b) {
                       return a.arrival_ms < b.arrival_ms;
                     });
  }
  const std::uint64_t base = requests.front().arrival_ms;
  for (auto& r : requests) r.arrival_ms -= base;
  result.trace.requests = std::move(requests);
  result.trace.label = std::move(label);
  return result;
}

}  // namespace

ParseResult parse_trace(std::string_view text, std::string label) {
  std::vector<TraceRequest> requests;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (is_blank(line)) continue;
    requests.push_back(parse_record(line, line_no));
  }
  return finish(std::move(requests), std::move(label));
}

ParseResult parse_trace(std::istream& in, std::string label) {
  std::vector<TraceRequest> requests;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    requests.push_back(parse_record(line, line_no));
  }
  return finish(std::move(requests), std::move(label));
}

namespace {

std::string read_gzip(const std::filesystem::path& path) {
  gzFile gz = gzopen(path.c_str(), "rb");
  if (gz == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "cannot open " + path.string());
  }
  std::string out;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(gz, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
  int errnum = 0;
  const char* msg = gzerror(gz, &errnum);
  const bool failed = n < 0 || (errnum != Z_OK && errnum != Z_STREAM_END);
  const std::string why = failed ? std::string(msg) : std::string();
  gzclose(gz);
  if (failed) throw Error(ErrorCode::kParse, "gzip error in " + path.string() + ": " + why);
  return out;
}

}  // namespace

ParseResult load_trace(const std::filesystem::path& path) {
  std::string label = path.stem().string();
  if (path.extension() == ".gz") {
    label = std::filesystem::path(label).stem().string();
    return parse_trace(read_gzip(path), std::move(label));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_trace(text, std::move(label));
}

std::string serialize_trace(const Trace& trace) {
  std::string out;
  out.reserve(trace.requests.size() * 96 + trace.total_blocks() * 8);
  for (const auto& r : trace.requests) {
    out += "{\"timestamp\":";
    out += std::to_string(r.arrival_ms);
    out += ",\"input_length\":";
    out += std::to_string(r.input_len);
    out += ",\"output_length\":";
    out += std::to_string(r.output_len);
    out += ",\"hash_ids\":[";
    for (std::size_t i = 0; i < r.block_ids.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(r.block_ids[i]);
    }
    out += "]}\n";
  }
  return out;
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  const std::string text = serialize_trace(trace);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kInvalidArgument, "write failed: " + path.string());
}

}  // namespace kvmeta
