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

// Little-endian primitives for the binary file formats.

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "das/error.hpp"

namespace das::binary {

template <typename U> void put_le(std::ostream& os, U v) {
  static_assert(std::is_unsigned_v<U>);
  char buf[sizeof(U)];
  for (std::size_t k = 0; k < sizeof(U); ++k) {
    buf[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
  }
  os.write(buf, sizeof(U));
}

template <typename U> U get_le(std::istream& is) {
  static_assert(std::is_unsigned_v<U>);
  unsigned char buf[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(U))) {
    throw Error(ErrorCode::payload_size, "unexpected end of file");
  }
  U v = 0;
  for (std::size_t k = 0; k < sizeof(U); ++k) {
    v |= static_cast<U>(buf[k]) << (8 * k);
  }
  return v;
}

inline void put_u32(std::ostream& os, std::uint32_t v) { put_le(os, v); }
inline void put_u64(std::ostream& os, std::uint64_t v) { put_le(os, v); }
inline void put_f32(std::ostream& os, float v) {
  put_le(os, std::bit_cast<std::uint32_t>(v));
}
inline void put_f64(std::ostream& os, double v) {
  put_le(os, std::bit_cast<std::uint64_t>(v));
}

inline std::uint32_t get_u32(std::istream& is) {
  return get_le<std::uint32_t>(is);
}
inline std::uint64_t get_u64(std::istream& is) {
  return get_le<std::uint64_t>(is);
}
inline float get_f32(std::istream& is) {
  return std::bit_cast<float>(get_le<std::uint32_t>(is));
}
inline double get_f64(std::istream& is) {
  return std::bit_cast<double>(get_le<std::uint64_t>(is));
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k) {
    s[static_cast<std::size_t>(k)] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

} // namespace das::binary
