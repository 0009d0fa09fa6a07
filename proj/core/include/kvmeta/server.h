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
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <thread>

#include "kvmeta/backend.h"
#include "kvmeta/net.h"
#include "kvmeta/protocol.h"

namespace kvmeta {

// Serves a Backend over the binary protocol. One thread per connection;
// requests on a connection are answered in order, one response each.
// Malformed frames get BAD_REQUEST and the connection stays open, except for
// an oversized length header, after which the stream cannot be resynchronized
// and the connection is closed.
//
// stop() stops accepting, lets each connection finish the request it is
// handling, then closes it.
class Server {
 public:
  Server(Backend& backend, net::Endpoint endpoint);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts the accept loop. Throws Error(kUnavailable) on bind failure.
  void start();
  void stop();

  std::uint16_t port() const { return port_; }
  net::Endpoint endpoint() const { return {endpoint_.host, port_}; }
  std::uint64_t connections_accepted() const { return accepted_.load(); }
  std::uint64_t requests_served() const { return served_.load(); }

 private:
  struct Connection {
    net::Socket socket;
    std::thread thread;
    std::atomic<bool> done{false};
  };

  void accept_loop();
  void serve_connection(Connection& conn);
  void reap_locked();

  Backend& backend_;
  net::Endpoint endpoint_;
  net::Socket listener_;
  std::uint16_t port_ = 0;
  std::thread acceptor_;
  std::atomic<bool> stopping_{false};
  std::atomic<std::uint64_t> accepted_{0};
  std::atomic<std::uint64_t> served_{0};
  std::mutex conns_mu_;
  std::list<std::unique_ptr<Connection>> conns_;
};

// Handles one decoded-or-not request frame against a backend. Exposed for
// tests that check protocol behaviour without sockets.
protocol::Frame handle_frame(Backend& backend, const protocol::Frame& request);

// Convenience: construct and start.
std::unique_ptr<Server> serve(const net::Endpoint& endpoint, Backend& backend);

}  // namespace kvmeta
