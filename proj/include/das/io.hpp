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

// File formats used by the command-line tool. See docs/formats.md.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "das/beamformer.hpp"
#include "das/quality.hpp"
#include "das/simulator.hpp"

namespace das::io {

inline constexpr int kSchemaVersion = 1;

/// Channel data plus the acquisition it came from.
struct Dataset {
  ChannelData data;
  ArrayGeometry geom;
  /// One scheme shared by all frames, or one per frame.
  std::vector<TransmitScheme> transmits;
  double c0 = 1540; // [m/s] nominal speed of sound
  /// Metadata document as read; unknown keys survive a save.
  nlohmann::json metadata = nlohmann::json::object();

  [[nodiscard]] const TransmitScheme& transmit_for(std::size_t frame) const {
    return transmits.size() == 1 ? transmits.front() : transmits.at(frame);
  }
};

// Dataset container layout:
//   8 bytes  magic "DASDSET1"
//   u64 LE   metadata length in bytes
//   metadata JSON document (UTF-8)
//   payload  float32 LE, frame-major, element-major blocks of n_s samples,
//            I then Q interleaved per sample when kind == "iq"
void save_dataset(const std::filesystem::path& path, const Dataset& ds);
[[nodiscard]] Dataset load_dataset(const std::filesystem::path& path);

/// Metadata document for `ds` (unknown keys from ds.metadata preserved).
[[nodiscard]] nlohmann::json dataset_metadata(const Dataset& ds);
/// Parses the known metadata keys; throws ErrorCode::schema naming the
/// offending field.
void parse_dataset_metadata(const nlohmann::json& meta, Dataset& ds);

struct PhantomFile {
  Phantom phantom;
  Dataset acquisition;    // metadata only; data is empty
  double speed_of_sound;  // [m/s] true medium speed
  AcquisitionSettings settings;
};

/// Phantom description: dataset metadata keys plus "scatterers" (rows of
/// [x_m, z_m, reflectivity]), optional "background", "speed_of_sound",
/// "seed" and "snr_db".
[[nodiscard]] PhantomFile load_phantom(const std::filesystem::path& path);
[[nodiscard]] PhantomFile parse_phantom(const nlohmann::json& doc);

struct GridSpec {
  double x0 = 0, x1 = 0, z0 = 0, z1 = 0; // [m]
  std::size_t nx = 0, nz = 0;

  [[nodiscard]] BeamformGrid grid() const {
    return BeamformGrid::rectilinear(x0, x1, z0, z1, nx, nz);
  }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// "X0,X1,Z0,Z1,NX,NZ" in meters.
[[nodiscard]] GridSpec parse_grid(std::string_view text);

struct BeamformedImage {
  GridSpec grid;
  std::vector<std::vector<cplx>> frames;
  nlohmann::json metadata = nlohmann::json::object();
};

// Raw beamformed output:
//   8 bytes  magic "DASRAW01"
//   u64 LE   metadata length
//   metadata JSON (grid, ordering, frames, ...)
//   payload  complex128 LE (re, im) per value, frame after frame, each frame
//            in column-major order (z fastest): index = ix * nz + iz
void save_raw(const std::filesystem::path& path, const BeamformedImage& img);
[[nodiscard]] BeamformedImage load_raw(const std::filesystem::path& path);

/// 8-bit binary PGM (P5), nz rows by nx columns, from [0, 1] values in grid
/// order.
void write_pgm(const std::filesystem::path& path, std::span<const double> img,
               std::size_t nx, std::size_t nz);

[[nodiscard]] std::vector<std::uint8_t> to_gray(std::span<const double> img);

enum class TargetKind { cyst, wire };

struct Target {
  TargetKind kind;
  Point center;
  double radius = 0; // cyst radius, or wire search radius [m]
  double outer = 0;  // cyst: exterior annulus outer radius [m]
};

/// CSV with header "kind,x_m,z_m,radius_m,outer_m".
[[nodiscard]] std::vector<Target> load_targets(const std::filesystem::path& path);

} // namespace das::io
