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

#include "kvmeta/meta_key.h"

#include <openssl/sha.h>

#include "kvmeta/error.h"

namespace kvmeta {

NamespaceTag make_namespace(std::string_view name) {
  if (name.size() > kNamespaceBytes) {
    throw Error(ErrorCode::kInvalidArgument,
                "namespace '" + std::string(name) + "' exceeds 24 bytes");
  }
  NamespaceTag tag{};
  std::memcpy(tag.data(), name.data(), name.size());
  return tag;
}

std::string namespace_name(const NamespaceTag& tag) {
  std::size_t n = tag.size();
  while (n > 0 && tag[n - 1] == 0) --n;
  return std::string(reinterpret_cast<const char*>(tag.data()), n);
}

MetaKey encode_key(const NamespaceTag& ns, BlockId id) {
  MetaKey key;
  std::memcpy(key.bytes.data(), ns.data(), kNamespaceBytes);
  for (int i = 0; i < 8; ++i) {
    key.bytes[kNamespaceBytes + i] = static_cast<std::uint8_t>(id >> (56 - 8 * i));
  }
  return key;
}

std::pair<NamespaceTag, BlockId> decode_key(const MetaKey& key) {
  NamespaceTag ns{};
  std::memcpy(ns.data(), key.bytes.data(), kNamespaceBytes);
  BlockId id = 0;
  for (int i = 0; i < 8; ++i) id = (id << 8) | key.bytes[kNamespaceBytes + i];
  return {ns, id};
}

MetaKey hashed_key(const NamespaceTag& ns, BlockId id) {
  const MetaKey ordered = encode_key(ns, id);
  MetaKey key;
  static_assert(SHA256_DIGEST_LENGTH == kKeyBytes);
  SHA256(ordered.bytes.data(), ordered.bytes.size(), key.bytes.data());
  return key;
}

MetaKey make_key(KeyScheme scheme, const NamespaceTag& ns, BlockId id) {
  return scheme == KeyScheme::kOrdered ? encode_key(ns, id) : hashed_key(ns, id);
}

std::string to_hex(const MetaKey& key) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(kKeyBytes * 2);
  for (auto b : key.bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xF];
  }
  return out;
}

std::string_view key_scheme_name(KeyScheme scheme) {
  return scheme == KeyScheme::kOrdered ? "ordered" : "strict_hash";
}

KeyScheme parse_key_scheme(std::string_view name) {
  if (name == "ordered") return KeyScheme::kOrdered;
  if (name == "strict_hash") return KeyScheme::kStrictHash;
  throw Error(ErrorCode::kInvalidArgument, "unknown key scheme '" + std::string(name) + "'");
}

}  // namespace kvmeta
