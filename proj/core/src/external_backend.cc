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

#include "kvmeta/external_backend.h"

#include <sys/socket.h>

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <cstring>

#include "kvmeta/error.h"

namespace kvmeta {
namespace resp {

std::string encode_command(const std::vector<std::string>& args) {
  std::string out = "*" + std::to_string(args.size()) + "\r\n";
  for (const auto& a : args) {
    out += "$" + std::to_string(a.size()) + "\r\n";
    out += a;
    out += "\r\n";
  }
  return out;
}

namespace {

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kProtocol, "bad RESP integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::size_t parse_reply(std::string_view buf, Reply& out) {
  const auto eol = buf.find("\r\n");
  if (eol == std::string_view::npos || buf.empty()) return 0;
  const char tag = buf[0];
  const std::string_view line = buf.substr(1, eol - 1);
  const std::size_t head = eol + 2;
  out = Reply{};
  switch (tag) {
    case '+':
      out.type = Reply::Type::kSimple;
      out.str = std::string(line);
      return head;
    case '-':
      out.type = Reply::Type::kError;
      out.str = std::string(line);
      return head;
    case ':':
      out.type = Reply::Type::kInteger;
      out.integer = parse_int(line);
      return head;
    case '$': {
      out.type = Reply::Type::kBulk;
      const std::int64_t len = parse_int(line);
      if (len < 0) {
        out.nil = true;
        return head;
      }
      const auto n = static_cast<std::size_t>(len);
      if (buf.size() < head + n + 2) return 0;
      if (buf.substr(head + n, 2) != "\r\n") throw Error(ErrorCode::kProtocol, "bad RESP bulk terminator");
      out.str = std::string(buf.substr(head, n));
      return head + n + 2;
    }
    case '*': {
      out.type = Reply::Type::kArray;
      const std::int64_t count = parse_int(line);
      if (count < 0) {
        out.nil = true;
        return head;
      }
      std::size_t used = head;
      for (std::int64_t i = 0; i < count; ++i) {
        Reply element;
        const std::size_t n = parse_reply(buf.substr(used), element);
        if (n == 0) return 0;
        used += n;
        out.elements.push_back(std::move(element));
      }
      return used;
    }
    default:
      throw Error(ErrorCode::kProtocol, std::string("unknown RESP type byte '") + tag + "'");
  }
}

}  // namespace resp

namespace {

std::string value_bytes(MetaValue v) {
  std::string s(8, '\0');
  for (int i = 0; i < 8; ++i) s[i] = static_cast<char>(v.address >> (56 - 8 * i));
  return s;
}

MetaValue parse_value(const std::string& s) {
  if (s.size() != 8) throw Error(ErrorCode::kBackend, "external value is not 8 bytes");
  std::uint64_t v = 0;
  for (char c : s) v = (v << 8) | static_cast<std::uint8_t>(c);
  return MetaValue{v};
}

MetaKey key_from_hex(std::string_view hex) {
  if (hex.size() != kKeyBytes * 2) throw Error(ErrorCode::kBackend, "bad index member");
  MetaKey k;
  for (std::size_t i = 0; i < kKeyBytes; ++i) {
    unsigned byte = 0;
    std::from_chars(hex.data() + 2 * i, hex.data() + 2 * i + 2, byte, 16);
    k.bytes[i] = static_cast<std::uint8_t>(byte);
  }
  return k;
}

}  // namespace

ExternalBackend::ExternalBackend(net::Endpoint endpoint, ExternalOptions options)
    : endpoint_(std::move(endpoint)), options_(std::move(options)) {
  socket_ = net::connect_to(endpoint_, options_.timeout);
  std::lock_guard lock(mu_);
  const auto pong = command_locked({"PING"});
  if (pong.type == resp::Reply::Type::kError) throw Error(ErrorCode::kBackend, pong.str);
}

std::string ExternalBackend::value_key(const MetaKey& key) const {
  return options_.key_prefix + std::string(key.bytes.begin(), key.bytes.end());
}

resp::Reply ExternalBackend::command_locked(const std::vector<std::string>& args) {
  if (!socket_.valid()) socket_ = net::connect_to(endpoint_, options_.timeout);
  try {
    const std::string wire = resp::encode_command(args);
    socket_.write_all(wire.data(), wire.size());
    resp::Reply reply;
    while (true) {
      if (const std::size_t used = resp::parse_reply(inbox_, reply); used > 0) {
        inbox_.erase(0, used);
        return reply;
      }
      char buf[4096];
      const ssize_t n = ::recv(socket_.fd(), buf, sizeof(buf), 0);
      if (n == 0) throw Error(ErrorCode::kTransport, "external service closed the connection");
      if (n < 0) {
        if (errno == EINTR) continue;
        if (errno == EAGAIN || errno == EWOULDBLOCK) throw Error(ErrorCode::kTimeout, "external service timed out");
        throw Error(ErrorCode::kTransport, std::string("recv: ") + std::strerror(errno));
      }
      inbox_.append(buf, static_cast<std::size_t>(n));
    }
  } catch (const Error& e) {
    if (e.is_transport()) {
      socket_.close();
      inbox_.clear();
    }
    throw;
  }
}

std::optional<MetaValue> ExternalBackend::put(const MetaKey& key, MetaValue value) {
  std::lock_guard lock(mu_);
  ++tallies_.puts;
  const auto prev = command_locked({"SET", value_key(key), value_bytes(value), "GET"});
  if (prev.type == resp::Reply::Type::kError) throw Error(ErrorCode::kBackend, prev.str);
  const auto added = command_locked({"ZADD", index_key(), "0", to_hex(key)});
  if (added.type == resp::Reply::Type::kError) throw Error(ErrorCode::kBackend, added.str);
  if (prev.nil) return std::nullopt;
  return parse_value(prev.str);
}

std::optional<MetaValue> ExternalBackend::get(const MetaKey& key) {
  std::lock_guard lock(mu_);
  ++tallies_.gets;
  const auto r = command_locked({"GET", value_key(key)});
  if (r.type == resp::Reply::Type::kError) throw Error(ErrorCode::kBackend, r.str);
  if (r.nil) return std::nullopt;
  return parse_value(r.str);
}

std::vector<ScanEntry> ExternalBackend::scan(const MetaKey& start, const MetaKey& end_exclusive,
                                             std::uint32_t max_results) {
  if (!(start < end_exclusive)) throw Error(ErrorCode::kBadRange, "scan requires start < end_exclusive");
  std::lock_guard lock(mu_);
  ++tallies_.scans;
  std::vector<ScanEntry> out;
  if (max_results == 0) return out;
  const auto members = command_locked({"ZRANGEBYLEX", index_key(), "[" + to_hex(start),
                                       "(" + to_hex(end_exclusive), "LIMIT", "0",
                                       std::to_string(max_results)});
  if (members.type != resp::Reply::Type::kArray) throw Error(ErrorCode::kBackend, members.str);
  if (members.elements.empty()) return out;
  std::vector<std::string> mget{"MGET"};
  std::vector<MetaKey> keys;
  for (const auto& m : members.elements) {
    keys.push_back(key_from_hex(m.str));
    mget.push_back(value_key(keys.back()));
  }
  const auto values = command_locked(mget);
  if (values.type != resp::Reply::Type::kArray || values.elements.size() != keys.size()) {
    throw Error(ErrorCode::kBackend, "unexpected MGET reply");
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    // Deleted between the two commands: it existed during the scan, but we
    // no longer know its value, so it is left out.
    if (values.elements[i].nil) continue;
    out.push_back({keys[i], parse_value(values.elements[i].str)});
  }
  return out;
}

bool ExternalBackend::erase(const MetaKey& key) {
  std::lock_guard lock(mu_);
  ++tallies_.deletes;
  const auto removed = command_locked({"DEL", value_key(key)});
  if (removed.type == resp::Reply::Type::kError) throw Error(ErrorCode::kBackend, removed.str);
  command_locked({"ZREM", index_key(), to_hex(key)});
  return removed.integer > 0;
}

IndexStats ExternalBackend::stats() {
  std::lock_guard lock(mu_);
  IndexStats s = tallies_;
  const auto card = command_locked({"ZCARD", index_key()});
  if (card.type == resp::Reply::Type::kInteger) s.stored_entries = static_cast<std::uint64_t>(card.integer);
  return s;
}

std::string ExternalBackend::describe() const { return "external:" + endpoint_.to_string(); }

net::Endpoint external_endpoint(std::string_view fallback) {
  if (const char* env = std::getenv("KVMETA_EXTERNAL_ADDR"); env != nullptr && *env != '\0') {
    return net::parse_endpoint(env);
  }
  return net::parse_endpoint(fallback);
}

}  // namespace kvmeta
