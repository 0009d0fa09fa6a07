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

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kvmeta/backend.h"
#include "kvmeta/net.h"

namespace kvmeta {

namespace resp {

// One RESP2 reply. Arrays hold nested elements; nil bulk strings and nil
// arrays set `nil`.
struct Reply {
  enum class Type { kSimple, kError, kInteger, kBulk, kArray };
  Type type = Type::kSimple;
  bool nil = false;
  std::string str;
  std::int64_t integer = 0;
  std::vector<Reply> elements;
};

std::string encode_command(const std::vector<std::string>& args);

// Parses one reply from the front of `buffer`. Returns the number of bytes
// consumed, or 0 if the buffer does not yet hold a complete reply. Throws
// Error(kProtocol) on malformed input.
std::size_t parse_reply(std::string_view buffer, Reply& out);

}  // namespace resp

struct ExternalOptions {
  std::string key_prefix = "kvmeta:";
  std::chrono::milliseconds timeout{1000};
};

// Adapter for a Redis-compatible in-memory service. Point operations use
// string GET/SET; the ordered view is a sorted set of hex-encoded keys
// (score 0) queried with ZRANGEBYLEX, whose values are then fetched with
// MGET. Requires SET ... GET (Redis >= 6.2). Stats are client-side tallies
// plus ZCARD for stored_entries.
//
// A single connection is shared under a mutex; this backend is for baseline
// comparisons, not throughput.
class ExternalBackend final : public Backend {
 public:
  explicit ExternalBackend(net::Endpoint endpoint, ExternalOptions options = {});

  std::optional<MetaValue> put(const MetaKey& key, MetaValue value) override;
  std::optional<MetaValue> get(const MetaKey& key) override;
  std::vector<ScanEntry> scan(const MetaKey& start, const MetaKey& end_exclusive,
                              std::uint32_t max_results) override;
  bool erase(const MetaKey& key) override;
  IndexStats stats() override;
  std::string describe() const override;

 private:
  resp::Reply command_locked(const std::vector<std::string>& args);
  std::string value_key(const MetaKey& key) const;
  std::string index_key() const { return options_.key_prefix + "idx"; }

  net::Endpoint endpoint_;
  ExternalOptions options_;
  std::mutex mu_;
  net::Socket socket_;
  std::string inbox_;
  IndexStats tallies_;
};

// Endpoint from KVMETA_EXTERNAL_ADDR when set, else `fallback`.
net::Endpoint external_endpoint(std::string_view fallback);

}  // namespace kvmeta
