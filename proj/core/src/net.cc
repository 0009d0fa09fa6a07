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

#include "kvmeta/net.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include "kvmeta/error.h"

namespace kvmeta::net {
namespace {

[[noreturn]] void io_error(const char* what) {
  const int err = errno;
  if (err == EAGAIN || err == EWOULDBLOCK) {
    throw Error(ErrorCode::kTimeout, std::string(what) + ": timed out");
  }
  throw Error(ErrorCode::kTransport, std::string(what) + ": " + std::strerror(err));
}

struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head) freeaddrinfo(head);
  }
};

void resolve(const Endpoint& ep, bool passive, AddrInfo& out) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  const std::string port = std::to_string(ep.port);
  const char* host = ep.host.empty() ? nullptr : ep.host.c_str();
  if (int rc = getaddrinfo(host, port.c_str(), &hints, &out.head); rc != 0) {
    throw Error(ErrorCode::kUnavailable,
                "cannot resolve " + ep.to_string() + ": " + gai_strerror(rc));
  }
}

}  // namespace

Endpoint parse_endpoint(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon + 1 == text.size()) {
    throw Error(ErrorCode::kInvalidArgument, "endpoint must be host:port, got '" + std::string(text) + "'");
  }
  Endpoint ep;
  std::string_view host = text.substr(0, colon);
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  ep.host = std::string(host);
  const std::string_view port = text.substr(colon + 1);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "bad port in '" + std::string(text) + "'");
  }
  ep.port = static_cast<std::uint16_t>(value);
  return ep;
}

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.release();
  }
  return *this;
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::set_timeout(std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  ::setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

void Socket::set_nodelay() {
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

void Socket::write_all(const void* data, std::size_t size) {
  const auto* p = static_cast<const char*>(data);
  while (size > 0) {
    const ssize_t n = ::send(fd_, p, size, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_error("send");
    }
    p += n;
    size -= static_cast<std::size_t>(n);
  }
}

bool Socket::read_exact(void* data, std::size_t size) {
  auto* p = static_cast<char*>(data);
  std::size_t got = 0;
  while (got < size) {
    const ssize_t n = ::recv(fd_, p + got, size - got, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_error("recv");
    }
    if (n == 0) {
      if (got == 0) return false;
      throw Error(ErrorCode::kTransport, "connection closed mid-frame");
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

Socket connect_to(const Endpoint& endpoint, std::chrono::milliseconds timeout) {
  AddrInfo ai;
  resolve(endpoint, false, ai);
  int last_errno = 0;
  for (addrinfo* a = ai.head; a != nullptr; a = a->ai_next) {
    Socket s(::socket(a->ai_family, a->ai_socktype, a->ai_protocol));
    if (!s.valid()) continue;
    s.set_timeout(timeout);
    if (::connect(s.fd(), a->ai_addr, a->ai_addrlen) == 0) {
      s.set_nodelay();
      return s;
    }
    last_errno = errno;
  }
  throw Error(ErrorCode::kUnavailable,
              "cannot connect to " + endpoint.to_string() + ": " + std::strerror(last_errno));
}

Socket listen_on(const Endpoint& endpoint, int backlog) {
  AddrInfo ai;
  resolve(endpoint, true, ai);
  int last_errno = 0;
  for (addrinfo* a = ai.head; a != nullptr; a = a->ai_next) {
    Socket s(::socket(a->ai_family, a->ai_socktype, a->ai_protocol));
    if (!s.valid()) continue;
    int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(s.fd(), a->ai_addr, a->ai_addrlen) == 0 && ::listen(s.fd(), backlog) == 0) {
      return s;
    }
    last_errno = errno;
  }
  throw Error(ErrorCode::kUnavailable,
              "cannot listen on " + endpoint.to_string() + ": " + std::strerror(last_errno));
}

std::uint16_t local_port(const Socket& socket) {
  sockaddr_storage addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(socket.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    io_error("getsockname");
  }
  if (addr.ss_family == AF_INET6) {
    return ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  }
  return ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
}

void write_frame(Socket& socket, const protocol::Frame& frame) {
  const auto bytes = protocol::to_wire(frame);
  socket.write_all(bytes.data(), bytes.size());
}

std::optional<protocol::Frame> read_frame(Socket& socket) {
  std::uint8_t header[protocol::kHeaderBytes];
  if (!socket.read_exact(header, sizeof(header))) return std::nullopt;
  const std::uint32_t len = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                            (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
  if (len > protocol::kMaxPayload) {
    throw Error(ErrorCode::kProtocol, "frame payload " + std::to_string(len) + " exceeds 16 MiB");
  }
  protocol::Frame f;
  f.opcode = header[4];
  f.payload.resize(len);
  if (len > 0 && !socket.read_exact(f.payload.data(), len)) {
    throw Error(ErrorCode::kTransport, "connection closed mid-frame");
  }
  return f;
}

}  // namespace kvmeta::net
