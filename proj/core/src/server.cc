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

#include "kvmeta/server.h"

#include <sys/socket.h>

#include "kvmeta/error.h"

namespace kvmeta {

using protocol::ErrorResponse;
using protocol::Frame;
using protocol::Status;

protocol::Frame handle_frame(Backend& backend, const Frame& request) {
  protocol::Request decoded;
  try {
    decoded = protocol::decode_request(request);
  } catch (const Error&) {
    return protocol::encode_response(ErrorResponse{request.opcode, Status::kBadRequest});
  }

  try {
    protocol::Response response = std::visit(
        [&](const auto& r) -> protocol::Response {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, protocol::PutRequest>) {
            return protocol::PutResponse{backend.put(r.key, r.value)};
          } else if constexpr (std::is_same_v<T, protocol::GetRequest>) {
            return protocol::GetResponse{backend.get(r.key)};
          } else if constexpr (std::is_same_v<T, protocol::ScanRequest>) {
            return protocol::ScanResponse{backend.scan(r.start, r.end_exclusive, r.max_results)};
          } else if constexpr (std::is_same_v<T, protocol::DeleteRequest>) {
            return protocol::DeleteResponse{backend.erase(r.key)};
          } else {
            return protocol::StatsResponse{backend.stats()};
          }
        },
        decoded);
    return protocol::encode_response(response);
  } catch (const Error& e) {
    const bool bad = e.code() == ErrorCode::kBadRange || e.code() == ErrorCode::kScansDisabled ||
                     e.code() == ErrorCode::kInvalidArgument;
    return protocol::encode_response(
        ErrorResponse{request.opcode, bad ? Status::kBadRequest : Status::kInternal});
  } catch (const std::exception&) {
    return protocol::encode_response(ErrorResponse{request.opcode, Status::kInternal});
  }
}

Server::Server(Backend& backend, net::Endpoint endpoint)
    : backend_(backend), endpoint_(std::move(endpoint)) {}

Server::~Server() { stop(); }

void Server::start() {
  listener_ = net::listen_on(endpoint_);
  port_ = net::local_port(listener_);
  acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::stop() {
  if (stopping_.exchange(true)) return;
  if (listener_.valid()) ::shutdown(listener_.fd(), SHUT_RDWR);
  if (acceptor_.joinable()) acceptor_.join();
  listener_.close();

  std::list<std::unique_ptr<Connection>> conns;
  {
    std::lock_guard lock(conns_mu_);
    conns.swap(conns_);
  }
  // Ends each connection's read loop after its in-flight request is answered.
  for (auto& c : conns) ::shutdown(c->socket.fd(), SHUT_RD);
  for (auto& c : conns) {
    if (c->thread.joinable()) c->thread.join();
  }
}

void Server::reap_locked() {
  for (auto it = conns_.begin(); it != conns_.end();) {
    if ((*it)->done.load()) {
      (*it)->thread.join();
      it = conns_.erase(it);
    } else {
      ++it;
    }
  }
}

void Server::accept_loop() {
  while (!stopping_.load()) {
    const int fd = ::accept(listener_.fd(), nullptr, nullptr);
    if (fd < 0) {
      if (stopping_.load()) break;
      if (errno == EINTR || errno == ECONNABORTED) continue;
      break;
    }
    auto conn = std::make_unique<Connection>();
    conn->socket = net::Socket(fd);
    conn->socket.set_nodelay();
    accepted_.fetch_add(1);
    std::lock_guard lock(conns_mu_);
    if (stopping_.load()) break;
    reap_locked();
    Connection* raw = conn.get();
    conns_.push_back(std::move(conn));
    raw->thread = std::thread([this, raw] { serve_connection(*raw); });
  }
}

void Server::serve_connection(Connection& conn) {
  try {
    while (true) {
      std::optional<Frame> request;
      try {
        request = net::read_frame(conn.socket);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kProtocol) {
          // Oversized header: answer, then drop the unsynchronizable stream.
          net::write_frame(conn.socket, protocol::encode_response(
                                            ErrorResponse{0, Status::kBadRequest}));
        }
        break;
      }
      if (!request) break;
      net::write_frame(conn.socket, handle_frame(backend_, *request));
      served_.fetch_add(1, std::memory_order_relaxed);
    }
  } catch (const std::exception&) {
    // Peer went away mid-response; nothing left to report to.
  }
  ::shutdown(conn.socket.fd(), SHUT_RDWR);
  conn.done.store(true);
}

std::unique_ptr<Server> serve(const net::Endpoint& endpoint, Backend& backend) {
  auto server = std::make_unique<Server>(backend, endpoint);
  server->start();
  return server;
}

}  // namespace kvmeta
