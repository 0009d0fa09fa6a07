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
#include <span>
#include <variant>
#include <vector>

#include "kvmeta/backend.h"
#include "kvmeta/meta_key.h"

// Binary request/response protocol for the metadata service.
//
// Every message is a frame: u32 big-endian payload length, one opcode byte,
// then the payload. Responses echo the request opcode and start their payload
// with a status byte. All integers are big-endian.
//
//   request payloads            response payload after status (OK)
//   PUT    key32 value8         u8 had_previous [value8]
//   GET    key32                value8 (NOT_FOUND: nothing)
//   SCAN   start32 end32 u32    u32 count, count x (key32 value8)
//   DELETE key32                u8 removed
//   STATS  (empty)              8 x u64 in IndexStats field order
namespace kvmeta::protocol {

inline constexpr std::uint32_t kMaxPayload = 16u << 20;
inline constexpr std::size_t kHeaderBytes = 5;

enum class Opcode : std::uint8_t { kPut = 1, kGet = 2, kScan = 3, kDelete = 4, kStats = 5 };
enum class Status : std::uint8_t { kOk = 0, kNotFound = 1, kBadRequest = 2, kInternal = 3 };

struct Frame {
  std::uint8_t opcode = 0;
  std::vector<std::uint8_t> payload;

  bool operator==(const Frame&) const = default;
};

struct PutRequest {
  MetaKey key;
  MetaValue value;
  bool operator==(const PutRequest&) const = default;
};
struct GetRequest {
  MetaKey key;
  bool operator==(const GetRequest&) const = default;
};
struct ScanRequest {
  MetaKey start;
  MetaKey end_exclusive;
  std::uint32_t max_results = 0;
  bool operator==(const ScanRequest&) const = default;
};
struct DeleteRequest {
  MetaKey key;
  bool operator==(const DeleteRequest&) const = default;
};
struct StatsRequest {
  bool operator==(const StatsRequest&) const = default;
};

using Request = std::variant<PutRequest, GetRequest, ScanRequest, DeleteRequest, StatsRequest>;

struct PutResponse {
  std::optional<MetaValue> previous;
  bool operator==(const PutResponse&) const = default;
};
struct GetResponse {
  std::optional<MetaValue> value;  // empty <=> NOT_FOUND
  bool operator==(const GetResponse&) const = default;
};
struct ScanResponse {
  std::vector<ScanEntry> entries;
  bool operator==(const ScanResponse&) const = default;
};
struct DeleteResponse {
  bool removed = false;
  bool operator==(const DeleteResponse&) const = default;
};
struct StatsResponse {
  IndexStats stats;
  bool operator==(const StatsResponse&) const = default;
};
// BAD_REQUEST or INTERNAL for any opcode, including unknown ones.
struct ErrorResponse {
  std::uint8_t opcode = 0;
  Status status = Status::kBadRequest;
  bool operator==(const ErrorResponse&) const = default;
};

using Response = std::variant<PutResponse, GetResponse, ScanResponse, DeleteResponse,
                              StatsResponse, ErrorResponse>;

Opcode opcode_of(const Request& request);

Frame encode_request(const Request& request);
// Throws Error(kProtocol) on unknown opcode or a payload of the wrong size.
Request decode_request(const Frame& frame);

Frame encode_response(const Response& response);
// Throws Error(kProtocol) on malformed payloads.
Response decode_response(const Frame& frame);

// Header + payload bytes as they appear on the wire.
std::vector<std::uint8_t> to_wire(const Frame& frame);
// Parses exactly one frame occupying all of `bytes`. Throws Error(kProtocol).
Frame from_wire(std::span<const std::uint8_t> bytes);

}  // namespace kvmeta::protocol
