// SPDX-License-Identifier: Apache-2.0
//
// sparsedas: delay-and-sum beamforming as a sparse matrix product
// Copyright (C) 2026 The sparsedas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace das {

enum class ErrorCode {
  invalid_argument,
  shape_mismatch,
  threshold_unreachable,
  infinite_fnumber,
  insufficient_aperture,
  unusable_region,
  unresolvable,
  schema,
  payload_size,
  io,
  cache_mismatch,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::invalid_argument:
    return "invalid_argument";
  case ErrorCode::shape_mismatch:
    return "shape_mismatch";
  case ErrorCode::threshold_unreachable:
    return "threshold_unreachable";
  case ErrorCode::infinite_fnumber:
    return "infinite_fnumber";
  case ErrorCode::insufficient_aperture:
    return "insufficient_aperture";
  case ErrorCode::unusable_region:
    return "unusable_region";
  case ErrorCode::unresolvable:
    return "unresolvable";
  case ErrorCode::schema:
    return "schema";
  case ErrorCode::payload_size:
    return "payload_size";
  case ErrorCode::io:
    return "io";
  case ErrorCode::cache_mismatch:
    return "cache_mismatch";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline void require(bool condition, std::string_view message,
                    ErrorCode code = ErrorCode::invalid_argument) {
  if (!condition) {
    throw Error(code, std::string(message));
  }
}

} // namespace das
