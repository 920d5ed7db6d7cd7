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

#include <bit>
#include <cstdint>
#include <string_view>

namespace das {

/// 64-bit FNV-1a over a canonical little-endian byte stream. Stable across
/// runs and platforms, unlike std::hash.
class Fnv1a {
public:
  void bytes(const unsigned char* p, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      state_ ^= p[k];
      state_ *= 0x100000001b3ULL;
    }
  }

  void u64(std::uint64_t v) {
    unsigned char buf[8];
    for (int k = 0; k < 8; ++k) {
      buf[k] = static_cast<unsigned char>(v >> (8 * k));
    }
    bytes(buf, 8);
  }

  void f64(double v) {
    // -0.0 and +0.0 describe the same geometry.
    u64(std::bit_cast<std::uint64_t>(v == 0 ? 0.0 : v));
  }

  void text(std::string_view s) {
    u64(s.size());
    bytes(reinterpret_cast<const unsigned char*>(s.data()), s.size());
  }

  [[nodiscard]] std::uint64_t value() const { return state_; }

private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

} // namespace das
