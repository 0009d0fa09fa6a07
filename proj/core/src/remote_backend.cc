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

#include "kvmeta/remote_backend.h"

#include "kvmeta/error.h"

namespace kvmeta {

using namespace protocol;

RemoteBackend::RemoteBackend(net::Endpoint endpoint, RemoteOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
  checkin(net::connect_to(endpoint_, options_.timeout));
}

net::Socket RemoteBackend::checkout() {
  {
    std::lock_guard lock(pool_mu_);
    if (!idle_.empty()) {
      net::Socket s = std::move(idle_.back());
      idle_.pop_back();
      return s;
    }
  }
  return net::connect_to(endpoint_, options_.timeout);
}

void RemoteBackend::checkin(net::Socket socket) {
  std::lock_guard lock(pool_mu_);
  idle_.push_back(std::move(socket));
}

std::size_t RemoteBackend::pooled_connections() const {
  std::lock_guard lock(pool_mu_);
  return idle_.size();
}

Response RemoteBackend::call(const Request& request) {
  net::Socket socket = checkout();
  const Frame out = encode_request(request);
  net::write_frame(socket, out);
  auto in = net::read_frame(socket);
  if (!in) throw Error(ErrorCode::kTransport, "server closed the connection");
  if (in->opcode != out.opcode) {
    throw Error(ErrorCode::kProtocol, "response opcode " + std::to_string(in->opcode) +
                                          " does not match request " + std::to_string(out.opcode));
  }
  Response response = decode_response(*in);
  checkin(std::move(socket));
  if (const auto* err = std::get_if<ErrorResponse>(&response)) {
    if (err->status == Status::kBadRequest) {
      throw Error(std::holds_alternative<ScanRequest>(request) ? ErrorCode::kBadRange
                                                               : ErrorCode::kInvalidArgument,
                  "server rejected request (BAD_REQUEST)");
    }
    throw Error(ErrorCode::kBackend, "server failed request (INTERNAL)");
  }
  return response;
}

namespace {

template <typename T>
T expect(Response response) {
  if (auto* r = std::get_if<T>(&response)) return std::move(*r);
  throw Error(ErrorCode::kProtocol, "unexpected response type");
}

}  // namespace

std::optional<MetaValue> RemoteBackend::put(const MetaKey& key, MetaValue value) {
  return expect<PutResponse>(call(PutRequest{key, value})).previous;
}

std::optional<MetaValue> RemoteBackend::get(const MetaKey& key) {
  return expect<GetResponse>(call(GetRequest{key})).value;
}

std::vector<ScanEntry> RemoteBackend::scan(const MetaKey& start, const MetaKey& end_exclusive,
                                           std::uint32_t max_results) {
  if (!(start < end_exclusive)) {
    throw Error(ErrorCode::kBadRange, "scan requires start < end_exclusive");
  }
  return expect<ScanResponse>(call(ScanRequest{start, end_exclusive, max_results})).entries;
}

bool RemoteBackend::erase(const MetaKey& key) {
  return expect<DeleteResponse>(call(DeleteRequest{key})).removed;
}

IndexStats RemoteBackend::stats() {
  return expect<StatsResponse>(call(StatsRequest{})).stats;
}

std::string RemoteBackend::describe() const { return "remote:" + endpoint_.to_string(); }

}  // namespace kvmeta
