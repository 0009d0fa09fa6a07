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

#include "manifest.h"

#include <openssl/evp.h>

#include <ctime>
#include <fstream>

#include "kvmeta/error.h"

namespace kvmeta::cli {

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string iso8601(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["tool"] = "kvmeta";
  j["version"] = KVMETA_VERSION;
  j["command_line"] = command_line;
  j["config"] = config;
  if (!trace_path.empty()) {
    j["trace"] = {{"label", trace_label}, {"path", trace_path}, {"sha256", trace_sha256}};
  }
  if (!backend.empty()) j["backend"] = backend;
  j["started_at"] = iso8601(started);
  j["finished_at"] = iso8601(finished);
  j["exit_code"] = exit_code;
  j["aborted"] = aborted;
  return j;
}

void RunManifest::set_trace(const std::filesystem::path& path, const std::string& label) {
  trace_path = path.string();
  trace_label = label;
  trace_sha256 = file_sha256(path);
}

void RunManifest::write(const std::filesystem::path& path) {
  finished = std::chrono::system_clock::now();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

}  // namespace kvmeta::cli
