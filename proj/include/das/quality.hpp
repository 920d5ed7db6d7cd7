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

// Contrast-to-noise ratio and full width at half maximum on beamformed
// frames.

#include <span>
#include <variant>

#include "das/beamformer.hpp"
#include "das/simulator.hpp"

namespace das {

struct Annulus {
  Point center;
  double inner = 0; // [m]
  double outer = 0; // [m]
};

struct Rectangle {
  double x_min = 0, x_max = 0; // [m]
  double z_min = 0, z_max = 0; // [m]
};

struct RegionSpec {
  Disk interior;
  std::variant<Annulus, Rectangle> exterior;
};

/// Minimum pixel count per region.
inline constexpr std::size_t kMinRegionPixels = 25;

/// |mu_in - mu_out| / sqrt(var_in + var_out) on the envelope in dB,
/// normalized to the frame maximum.
[[nodiscard]] double cnr(std::span<const cplx> values,
                         const BeamformGrid& grid, const RegionSpec& region);

enum class Axis { lateral, axial };

/// Width at 50% of the envelope peak found within `search_radius` of
/// `near`, measured along `axis` through the peak with linear interpolation.
/// Throws ErrorCode::unresolvable when the profile does not fall below half
/// the peak on both sides inside the grid.
[[nodiscard]] double fwhm(std::span<const cplx> values,
                          const BeamformGrid& grid, Point near, Axis axis,
                          double search_radius);

} // namespace das
