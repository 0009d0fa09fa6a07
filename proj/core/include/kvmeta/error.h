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

#include <stdexcept>
#include <string>
#include <string_view>

namespace kvmeta {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kEmptyTrace,
  kUndefined,
  kDegenerate,
  kBadRange,
  kScansDisabled,
  kResourceExhausted,
  kTransport,
  kTimeout,
  kProtocol,
  kBackend,
  kUnavailable,
};

std::string_view error_code_name(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Network or framing failure talking to a backend, as opposed to a
  // semantic failure reported by the backend itself.
  bool is_transport() const noexcept {
    return code_ == ErrorCode::kTransport || code_ == ErrorCode::kTimeout ||
           code_ == ErrorCode::kProtocol || code_ == ErrorCode::kUnavailable;
  }

 private:
  ErrorCode code_;
};

}  // namespace kvmeta
