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

// Travel distances and travel times for a uniform linear array (ULA).
//
// Coordinate system: x along the array (left to right), z pointing into the
// medium, origin at the array center. All lengths are in meters, times in
// seconds, angles in radians.

#include <vector>

namespace das {

struct Point {
  double x = 0; // [m] lateral
  double z = 0; // [m] depth

  friend bool operator==(const Point&, const Point&) = default;
};

struct ArrayGeometry {
  int num_elements = 0;
  double pitch = 0;         // [m] center-to-center spacing
  double element_width = 0; // [m]

  /// Center-to-center distance from the first to the last element.
  [[nodiscard]] double aperture_length() const {
    return (num_elements - 1) * pitch;
  }

  void validate() const;

  friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;
};

enum class TransmitKind { plane, circular, focused };

/// One transmit event. For circular waves the virtual source is derived from
/// (tilt, width) at construction time; use the factories below.
struct TransmitScheme {
  TransmitKind kind = TransmitKind::plane;
  double tilt = 0;       // [rad] counterclockwise from the z-axis
  double width = 0;      // [rad] angular width, circular only
  Point virtual_source;  // circular (z < 0) or focused (z > 0)
  double t0 = 0;         // [s] acquisition start time

  static TransmitScheme plane(double tilt, double t0 = 0);
  static TransmitScheme circular(double tilt, double width,
                                 double aperture_length, double t0 = 0);
  static TransmitScheme focused(Point focus, double t0 = 0);

  void validate() const;

  friend bool operator==(const TransmitScheme&,
                         const TransmitScheme&) = default;
};

struct Medium {
  double speed_of_sound = 1540; // [m/s]

  void validate() const;
};

/// x_i = (p/2)(2i - N_e - 1), z_i = 0, i = 1..N_e.
[[nodiscard]] std::vector<Point> element_positions(const ArrayGeometry& geom);

/// Lateral element coordinates only.
[[nodiscard]] std::vector<double> element_x(const ArrayGeometry& geom);

/// Virtual point source of a circular (diverging) wave of tilt theta and
/// angular width beta emitted by an array of length L.
[[nodiscard]] Point virtual_source(double theta, double beta, double L);

/// Transmit distance of a diverging wave with its virtual source behind the
/// array (source.z < 0). Only certified for points in the array's shadow;
/// other points are computed with the same formula.
[[nodiscard]] double transmit_distance_circular(Point pt, Point source,
                                                double L);

/// Plane-wave limit of the circular transmit distance.
[[nodiscard]] double transmit_distance_plane(Point pt, double theta, double L);

/// Diverging (source.z < 0) or focused (source.z > 0) transmit distance.
[[nodiscard]] double transmit_distance_general(Point pt, Point source,
                                               double L);

/// Dispatches on scheme.kind.
[[nodiscard]] double transmit_distance(Point pt, const TransmitScheme& scheme,
                                       double L);

[[nodiscard]] double receive_distance(Point pt, double element_x);

/// Two-way travel time minus the acquisition start time t0.
[[nodiscard]] double travel_time(Point pt, double element_x,
                                 const TransmitScheme& scheme,
                                 const ArrayGeometry& geom,
                                 const Medium& medium);

/// Residual of the diffraction hyperbola of a scatterer at pt, evaluated at
/// (x, t) where t is absolute time (tau + t0). Zero on the hyperbola.
[[nodiscard]] double hyperbola_residual(Point pt, double x, double t,
                                        const TransmitScheme& scheme,
                                        const ArrayGeometry& geom,
                                        const Medium& medium);

} // namespace das
