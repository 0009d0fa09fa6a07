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
#include <optional>
#include <string>
#include <string_view>

#include "kvmeta/protocol.h"

namespace kvmeta::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  std::string to_string() const { return host + ":" + std::to_string(port); }
};

// "host:port"; an IPv6 host may be bracketed. Throws Error(kInvalidArgument).
Endpoint parse_endpoint(std::string_view text);

// Owning TCP socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { close(); }
  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release() {
    int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void close();

  // Applies to both send and receive; zero disables the timeout.
  void set_timeout(std::chrono::milliseconds timeout);
  void set_nodelay();

  void write_all(const void* data, std::size_t size);
  // Returns false on clean EOF before the first byte; throws on partial reads.
  bool read_exact(void* data, std::size_t size);

 private:
  int fd_ = -1;
};

// Throws Error(kUnavailable) when the peer cannot be reached.
Socket connect_to(const Endpoint& endpoint, std::chrono::milliseconds timeout);
// Bound, listening socket. Port 0 picks an ephemeral port.
Socket listen_on(const Endpoint& endpoint, int backlog = 128);
std::uint16_t local_port(const Socket& socket);

void write_frame(Socket& socket, const protocol::Frame& frame);
// Empty on clean EOF at a frame boundary. Throws Error(kProtocol) for a
// header announcing more than kMaxPayload bytes, and transport errors
// (kTransport, kTimeout) for I/O failures.
std::optional<protocol::Frame> read_frame(Socket& socket);

}  // namespace kvmeta::net
