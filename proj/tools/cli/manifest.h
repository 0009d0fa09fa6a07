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
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kvmeta::cli {

// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::filesystem::path& path);

// Everything needed to re-run a command; written next to its outputs.
struct RunManifest {
  std::vector<std::string> command_line;
  nlohmann::json config = nlohmann::json::object();
  std::string trace_label;
  std::string trace_path;
  std::string trace_sha256;
  std::string backend;
  std::chrono::system_clock::time_point started = std::chrono::system_clock::now();
  std::chrono::system_clock::time_point finished{};
  int exit_code = 0;
  bool aborted = false;

  nlohmann::json to_json() const;
  void set_trace(const std::filesystem::path& path, const std::string& label);
  // Stamps `finished` and writes pretty-printed JSON.
  void write(const std::filesystem::path& path);
};

std::string iso8601(std::chrono::system_clock::time_point t);

}  // namespace kvmeta::cli
