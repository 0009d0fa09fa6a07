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

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <utility>

#include "kvmeta/trace.h"

namespace kvmeta {

inline constexpr std::size_t kKeyBytes = 32;
inline constexpr std::size_t kNamespaceBytes = 24;

using NamespaceTag = std::array<std::uint8_t, kNamespaceBytes>;

// 32-byte store key. Under the ordered scheme the layout is
// namespace (24 bytes) || big-endian block id (8 bytes), so byte order equals
// numeric id order within a namespace.
struct MetaKey {
  std::array<std::uint8_t, kKeyBytes> bytes{};

  auto operator<=>(const MetaKey&) const = default;
  bool operator==(const MetaKey&) const = default;
};

// Opaque 8-byte locator of a KVC block.
struct MetaValue {
  std::uint64_t address = 0;

  auto operator<=>(const MetaValue&) const = default;
  bool operator==(const MetaValue&) const = default;
};

struct ScanEntry {
  MetaKey key;
  MetaValue value;

  bool operator==(const ScanEntry&) const = default;
};

enum class KeyScheme {
  kOrdered,     // namespace || big-endian id; range scans meaningful
  kStrictHash,  // SHA-256(namespace || id); scans disabled
};

struct MetaKeyHash {
  std::size_t operator()(const MetaKey& k) const noexcept {
    std::uint64_t w[4];
    std::memcpy(w, k.bytes.data(), sizeof(w));
    std::uint64_t h = w[0] * 0x9E3779B97F4A7C15ULL;
    h ^= (w[1] + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2));
    h ^= (w[2] + 0x85EBCA77C2B2AE63ULL + (h << 6) + (h >> 2));
    h ^= (w[3] + 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2));
    h ^= h >> 33;
    h *= 0xFF51AFD7ED558CCDULL;
    h ^= h >> 33;
    return static_cast<std::size_t>(h);
  }
};

// Zero-padded UTF-8 name; throws Error(kInvalidArgument) past 24 bytes.
NamespaceTag make_namespace(std::string_view name);
std::string namespace_name(const NamespaceTag& tag);

MetaKey encode_key(const NamespaceTag& ns, BlockId id);
std::pair<NamespaceTag, BlockId> decode_key(const MetaKey& key);

// SHA-256 of the ordered encoding; destroys id order.
MetaKey hashed_key(const NamespaceTag& ns, BlockId id);

MetaKey make_key(KeyScheme scheme, const NamespaceTag& ns, BlockId id);

std::string to_hex(const MetaKey& key);

std::string_view key_scheme_name(KeyScheme scheme);
KeyScheme parse_key_scheme(std::string_view name);

}  // namespace kvmeta

template <>
struct std::hash<kvmeta::MetaKey> : kvmeta::MetaKeyHash {};
