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

#include "kvmeta/protocol.h"

#include <string>

#include "kvmeta/error.h"

namespace kvmeta::protocol {
namespace {

constexpr std::size_t kKey = kKeyBytes;
constexpr std::size_t kValue = 8;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kProtocol, "malformed frame: " + what);
}

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void u64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void key(const MetaKey& k) { out_.insert(out_.end(), k.bytes.begin(), k.bytes.end()); }
  void value(MetaValue v) { u64(v.address); }

 private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }
  MetaKey key() {
    need(kKey);
    MetaKey k;
    std::copy_n(in_.begin() + static_cast<std::ptrdiff_t>(pos_), kKey, k.bytes.begin());
    pos_ += kKey;
    return k;
  }
  MetaValue value() { return MetaValue{u64()}; }
  std::size_t remaining() const { return in_.size() - pos_; }
  void finish() const {
    if (remaining() != 0) malformed(std::to_string(remaining()) + " trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) malformed("truncated payload");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

bool known_opcode(std::uint8_t op) { return op >= 1 && op <= 5; }

}  // namespace

Opcode opcode_of(const Request& request) {
  return static_cast<Opcode>(request.index() + 1);
}

Frame encode_request(const Request& request) {
  Frame f;
  f.opcode = static_cast<std::uint8_t>(opcode_of(request));
  Writer w(f.payload);
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PutRequest>) {
          w.key(r.key);
          w.value(r.value);
        } else if constexpr (std::is_same_v<T, GetRequest> || std::is_same_v<T, DeleteRequest>) {
          w.key(r.key);
        } else if constexpr (std::is_same_v<T, ScanRequest>) {
          w.key(r.start);
          w.key(r.end_exclusive);
          w.u32(r.max_results);
        }
      },
      request);
  return f;
}

Request decode_request(const Frame& frame) {
  Reader r(frame.payload);
  Request out;
  switch (frame.opcode) {
    case static_cast<std::uint8_t>(Opcode::kPut): {
      PutRequest p;
      p.key = r.key();
      p.value = r.value();
      out = p;
      break;
    }
    case static_cast<std::uint8_t>(Opcode::kGet):
      out = GetRequest{r.key()};
      break;
    case static_cast<std::uint8_t>(Opcode::kScan): {
      ScanRequest s;
      s.start = r.key();
      s.end_exclusive = r.key();
      s.max_results = r.u32();
      out = s;
      break;
    }
    case static_cast<std::uint8_t>(Opcode::kDelete):
      out = DeleteRequest{r.key()};
      break;
    case static_cast<std::uint8_t>(Opcode::kStats):
      out = StatsRequest{};
      break;
    default:
      malformed("unknown opcode " + std::to_string(frame.opcode));
  }
  r.finish();
  return out;
}

Frame encode_response(const Response& response) {
  Frame f;
  Writer w(f.payload);
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PutResponse>) {
          f.opcode = static_cast<std::uint8_t>(Opcode::kPut);
          w.u8(static_cast<std::uint8_t>(Status::kOk));
          w.u8(r.previous ? 1 : 0);
          if (r.previous) w.value(*r.previous);
        } else if constexpr (std::is_same_v<T, GetResponse>) {
          f.opcode = static_cast<std::uint8_t>(Opcode::kGet);
          w.u8(static_cast<std::uint8_t>(r.value ? Status::kOk : Status::kNotFound));
          if (r.value) w.value(*r.value);
        } else if constexpr (std::is_same_v<T, ScanResponse>) {
          f.opcode = static_cast<std::uint8_t>(Opcode::kScan);
          w.u8(static_cast<std::uint8_t>(Status::kOk));
          w.u32(static_cast<std::uint32_t>(r.entries.size()));
          for (const auto& e : r.entries) {
            w.key(e.key);
            w.value(e.value);
          }
        } else if constexpr (std::is_same_v<T, DeleteResponse>) {
          f.opcode = static_cast<std::uint8_t>(Opcode::kDelete);
          w.u8(static_cast<std::uint8_t>(Status::kOk));
          w.u8(r.removed ? 1 : 0);
        } else if constexpr (std::is_same_v<T, StatsResponse>) {
          f.opcode = static_cast<std::uint8_t>(Opcode::kStats);
          w.u8(static_cast<std::uint8_t>(Status::kOk));
          const auto& s = r.stats;
          for (auto v : {s.puts, s.gets, s.scans, s.deletes, s.cache_hits, s.cache_misses,
                         s.resident_entries, s.stored_entries}) {
            w.u64(v);
          }
        } else {
          f.opcode = r.opcode;
          w.u8(static_cast<std::uint8_t>(r.status));
        }
      },
      response);
  if (f.payload.size() > kMaxPayload) {
    throw Error(ErrorCode::kProtocol, "response exceeds maximum frame payload");
  }
  return f;
}

Response decode_response(const Frame& frame) {
  Reader r(frame.payload);
  const std::uint8_t raw_status = r.u8();
  if (raw_status > static_cast<std::uint8_t>(Status::kInternal)) {
    malformed("unknown status " + std::to_string(raw_status));
  }
  const auto status = static_cast<Status>(raw_status);
  if (status == Status::kBadRequest || status == Status::kInternal || !known_opcode(frame.opcode)) {
    if (status != Status::kBadRequest && status != Status::kInternal) {
      malformed("unknown opcode " + std::to_string(frame.opcode));
    }
    r.finish();
    return ErrorResponse{frame.opcode, status};
  }
  const auto op = static_cast<Opcode>(frame.opcode);
  if (status == Status::kNotFound && op != Opcode::kGet) malformed("NOT_FOUND on non-GET");

  Response out;
  switch (op) {
    case Opcode::kPut: {
      PutResponse p;
      const std::uint8_t had = r.u8();
      if (had > 1) malformed("had_previous flag " + std::to_string(had));
      if (had) p.previous = r.value();
      out = p;
      break;
    }
    case Opcode::kGet: {
      GetResponse g;
      if (status == Status::kOk) g.value = r.value();
      out = g;
      break;
    }
    case Opcode::kScan: {
      ScanResponse s;
      const std::uint32_t count = r.u32();
      if (r.remaining() != static_cast<std::size_t>(count) * (kKey + kValue)) {
        malformed("scan count does not match payload");
      }
      s.entries.reserve(count);
      for (std::uint32_t i = 0; i < count; ++i) {
        ScanEntry e;
        e.key = r.key();
        e.value = r.value();
        s.entries.push_back(e);
      }
      out = std::move(s);
      break;
    }
    case Opcode::kDelete: {
      const std::uint8_t removed = r.u8();
      if (removed > 1) malformed("removed flag " + std::to_string(removed));
      out = DeleteResponse{removed == 1};
      break;
    }
    case Opcode::kStats: {
      StatsResponse s;
      s.stats.puts = r.u64();
      s.stats.gets = r.u64();
      s.stats.scans = r.u64();
      s.stats.deletes = r.u64();
      s.stats.cache_hits = r.u64();
      s.stats.cache_misses = r.u64();
      s.stats.resident_entries = r.u64();
      s.stats.stored_entries = r.u64();
      out = s;
      break;
    }
  }
  r.finish();
  return out;
}

std::vector<std::uint8_t> to_wire(const Frame& frame) {
  if (frame.payload.size() > kMaxPayload) {
    throw Error(ErrorCode::kProtocol, "payload exceeds 16 MiB");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + frame.payload.size());
  Writer w(out);
  w.u32(static_cast<std::uint32_t>(frame.payload.size()));
  w.u8(frame.opcode);
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  return out;
}

Frame from_wire(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const std::uint32_t len = r.u32();
  if (len > kMaxPayload) malformed("payload length " + std::to_string(len) + " exceeds 16 MiB");
  Frame f;
  f.opcode = r.u8();
  if (r.remaining() != len) malformed("length field does not match payload size");
  f.payload.assign(bytes.begin() + kHeaderBytes, bytes.end());
  return f;
}

}  // namespace kvmeta::protocol
