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

#include <atomic>
#include <chrono>
#include <mutex>
#include <vector>

#include "kvmeta/backend.h"
#include "kvmeta/net.h"
#include "kvmeta/protocol.h"

namespace kvmeta {

struct RemoteOptions {
  std::chrono::milliseconds timeout{1000};  // per operation
};

// Backend that forwards every operation as one request/response exchange.
// Safe for concurrent use: each in-flight operation checks out its own pooled
// connection, so the pool grows to the number of concurrent callers. A
// connection that saw any transport error is discarded.
class RemoteBackend final : public Backend {
 public:
  // Connects once eagerly; throws Error(kUnavailable) if unreachable.
  explicit RemoteBackend(net::Endpoint endpoint, RemoteOptions options = {});

  std::optional<MetaValue> put(const MetaKey& key, MetaValue value) override;
  std::optional<MetaValue> get(const MetaKey& key) override;
  std::vector<ScanEntry> scan(const MetaKey& start, const MetaKey& end_exclusive,
                              std::uint32_t max_results) override;
  bool erase(const MetaKey& key) override;
  IndexStats stats() override;
  std::string describe() const override;

  std::size_t pooled_connections() const;

 private:
  protocol::Response call(const protocol::Request& request);
  net::Socket checkout();
  void checkin(net::Socket socket);

  net::Endpoint endpoint_;
  RemoteOptions options_;
  mutable std::mutex pool_mu_;
  std::vector<net::Socket> idle_;
};

}  // namespace kvmeta
